#ifndef LONGLAB_LONGLAB_H
#define LONGLAB_LONGLAB_H

/* C interface to the longitude laboratory. All entry points are
 * exception-free: failures come back as status codes and the message of the
 * most recent failure on the calling thread is kept by ll_last_error().
 * Objects returned through ll_* out-parameters are owned by the caller and
 * released with the matching ll_*_free(). */

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ll_status {
  LL_OK = 0,
  LL_ERR_INVALID_ARGUMENT = 1, /* bad arguments, ranges, dimensions */
  LL_ERR_CONFIG = 2,           /* malformed or contradictory experiment config */
  LL_ERR_IO = 3,               /* missing or unwritable files, parse failures */
  LL_ERR_NUMERIC = 4,          /* solver did not meet its contract */
  LL_ERR_DOMAIN = 5,           /* inputs outside a routine's mathematical domain */
  LL_ERR_UNKNOWN = 6
} ll_status;

const char* ll_version(void);

/* Message of the last failing call on this thread; empty string if none. The
 * pointer stays valid until the next failing call on the same thread. */
const char* ll_last_error(void);

typedef struct ll_report ll_report;
typedef struct ll_graph ll_graph;

/* Run the experiment described by a config file or its literal text.
 * seed_override >= 0 replaces the config seed; tolerance_scale > 0 replaces
 * the config tolerance scale. On success *out holds a new report. */
ll_status ll_run_config_file(const char* path, int64_t seed_override, double tolerance_scale,
                             ll_report** out);
ll_status ll_run_config_text(const char* text, int64_t seed_override, double tolerance_scale,
                             ll_report** out);

/* Reports: load a report.json produced earlier, write report.json plus
 * report.csv into a directory (created if missing), or render one SVG per
 * plottable series. */
ll_status ll_report_load(const char* json_path, ll_report** out);
ll_status ll_report_write(const ll_report* r, const char* out_dir);
ll_status ll_report_plots(const ll_report* r, const char* out_dir, int* files_written);

const char* ll_report_kind(const ll_report* r);
const char* ll_report_config_hash(const ll_report* r);
int ll_report_all_pass(const ll_report* r); /* 1, 0, or -1 on null */
size_t ll_report_record_count(const ll_report* r);
/* Name of record i, or NULL when i is out of range. */
const char* ll_report_record_name(const ll_report* r, size_t i);
/* Fills any non-NULL of measured/reference/tolerance for record i and
 * returns its pass flag (0 or 1), or -1 when i is out of range. */
int ll_report_record_values(const ll_report* r, size_t i, double* measured, double* reference,
                            double* tolerance);
void ll_report_free(ll_report* r);

/* Minimal-graph height fields in the library text format. */
ll_status ll_graph_load(const char* path, ll_graph** out);
ll_status ll_graph_save(const ll_graph* g, const char* path);
int64_t ll_graph_node_count(const ll_graph* g); /* active nodes, -1 on null */
double ll_graph_residual(const ll_graph* g);    /* area-gradient residual */
void ll_graph_free(ll_graph* g);

#ifdef __cplusplus
}
#endif

#endif
