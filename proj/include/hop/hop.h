/*
 * hop — geo-referenced aerial localization toolkit, C API.
 *
 * All functions return hop_status; every handle created by a *_load /
 * *_build / *_create call must be released with the matching *_free.
 * On failure, hop_last_error() returns a thread-local message describing
 * what went wrong.
 */
#ifndef HOP_H
#define HOP_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define HOP_API __declspec(dllexport)
#else
#define HOP_API __attribute__((visibility("default")))
#endif

typedef enum hop_status {
    HOP_OK = 0,
    HOP_E_USAGE = 1, /* bad arguments or configuration */
    HOP_E_DATA = 2,  /* unreadable or inconsistent input data */
    HOP_E_ABORT = 3  /* pipeline gave up (e.g. no confident global fix) */
} hop_status;

typedef struct hop_config hop_config; /* key=value run configuration */
typedef struct hop_map hop_map;       /* reference map raster + scale */
typedef struct hop_table hop_table;   /* precomputed map descriptor table */

typedef struct hop_run_summary {
    uint64_t frames;
    double registered_fraction;
    double predicted_fraction;
    uint64_t reinit_count;
    double wall_s;
    double hz;
} hop_run_summary;

typedef struct hop_eval_summary {
    uint64_t frames;
    double rmse_m;
    double mean_err_m;
    double max_err_m;
    double registered_fraction;
    double predicted_fraction;
    uint64_t reinit_count;
} hop_eval_summary;

HOP_API const char* hop_version(void);

/* Thread-local message for the most recent failure in this thread. */
HOP_API const char* hop_last_error(void);

/* ------------------------------------------------------------ config -- */

HOP_API hop_status hop_config_create(hop_config** out);
HOP_API hop_status hop_config_load(const char* path, hop_config** out);
HOP_API hop_status hop_config_set(hop_config* cfg, const char* key, const char* value);
/* Returns NULL for unknown keys; otherwise valid until the next call on cfg. */
HOP_API const char* hop_config_get(hop_config* cfg, const char* key);
HOP_API void hop_config_free(hop_config* cfg);

/* --------------------------------------------------------------- map -- */

HOP_API hop_status hop_map_load(const char* image_path, const char* meta_path, hop_map** out);
/* Deterministic synthetic reference map written to image/meta paths. */
HOP_API hop_status hop_map_synth(int width, int height, double px_per_m, uint64_t seed,
                                 const char* image_path, const char* meta_path);
HOP_API int hop_map_width(const hop_map* map);
HOP_API int hop_map_height(const hop_map* map);
HOP_API double hop_map_px_per_m(const hop_map* map);
HOP_API void hop_map_free(hop_map* map);

/* ------------------------------------------------------------- table -- */

HOP_API hop_status hop_table_build(const hop_map* map, const hop_config* cfg, hop_table** out);
HOP_API hop_status hop_table_save(const hop_table* table, const char* path);
HOP_API hop_status hop_table_load(const char* path, hop_table** out);
HOP_API uint64_t hop_table_entry_count(const hop_table* table);
HOP_API uint32_t hop_table_descriptor_len(const hop_table* table);
HOP_API void hop_table_free(hop_table* table);

/* ---------------------------------------------------------- pipeline -- */

/* Render a synthetic flight dataset (frames + metadata + ground truth)
 * into out_dir per the sim.* configuration keys. */
HOP_API hop_status hop_simulate(const hop_map* map, const hop_config* cfg,
                                const char* out_dir, uint64_t* frames_out);

/* Localize every frame of a dataset; writes trajectory.csv and
 * metrics.json into out_dir. */
HOP_API hop_status hop_localize(const hop_map* map, const hop_table* table,
                                const char* dataset_dir, const hop_config* cfg,
                                const char* out_dir, hop_run_summary* summary_out);

/* RMSE and error split of a trajectory against ground truth. When
 * run_metrics_json is non-NULL its wall_s/hz fields are merged into the
 * metrics.json written to out_dir (pass NULL out_dir to skip files). */
HOP_API hop_status hop_evaluate(const char* trajectory_csv, const char* groundtruth_csv,
                                const char* run_metrics_json, const char* out_dir,
                                hop_eval_summary* summary_out);

/* Overlay trajectories (and optional ground truth) as an SVG figure. */
HOP_API hop_status hop_plot(const char* const* trajectory_csvs, int count,
                            const char* groundtruth_csv, const char* out_svg);

/* Match/non-match descriptor distance histograms over a dataset with
 * ground truth; writes calibration.csv/.json and reports a suggested
 * rejection threshold. */
HOP_API hop_status hop_calibrate(const hop_map* map, const hop_table* table,
                                 const char* dataset_dir, const char* groundtruth_csv,
                                 const hop_config* cfg, const char* out_dir,
                                 double* suggested_tau_out);

#ifdef __cplusplus
}
#endif

#endif /* HOP_H */
