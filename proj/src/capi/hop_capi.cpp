#include "hop/hop.h"

#include <cstring>
#include <fstream>
#include <string>

#include <json.hpp>

#include "core/config.hpp"
#include "core/descriptor.hpp"
#include "core/error.hpp"
#include "core/geodata.hpp"
#include "core/image_io.hpp"
#include "core/plot.hpp"
#include "core/runner.hpp"
#include "core/simulator.hpp"

namespace {

thread_local std::string g_last_error;

hop_status to_status(const hop::Error& e) {
    switch (e.code()) {
        case hop::ErrorCode::Usage: return HOP_E_USAGE;
        case hop::ErrorCode::Data: return HOP_E_DATA;
        case hop::ErrorCode::Abort: return HOP_E_ABORT;
    }
    return HOP_E_USAGE;
}

template <typename Fn>
hop_status guarded(Fn&& fn) {
    try {
        fn();
        return HOP_OK;
    } catch (const hop::Error& e) {
        g_last_error = e.what();
        return to_status(e);
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return HOP_E_DATA;
    } catch (...) {
        g_last_error = "unknown error";
        return HOP_E_DATA;
    }
}

hop_status require(bool cond, const char* msg) {
    if (cond) return HOP_OK;
    g_last_error = msg;
    return HOP_E_USAGE;
}

}  // namespace

struct hop_config {
    hop::Config cfg;
    std::string scratch;  // backs hop_config_get
};

struct hop_map {
    hop::GeoMap map;
};

struct hop_table {
    hop::HogTable table;
};

extern "C" {

const char* hop_version(void) { return "hop 1.0.0"; }

const char* hop_last_error(void) { return g_last_error.c_str(); }

hop_status hop_config_create(hop_config** out) {
    if (require(out != nullptr, "null output pointer")) return HOP_E_USAGE;
    return guarded([&] { *out = new hop_config(); });
}

hop_status hop_config_load(const char* path, hop_config** out) {
    if (require(path && out, "null argument")) return HOP_E_USAGE;
    return guarded([&] {
        auto* h = new hop_config();
        try {
            h->cfg = hop::Config::load_file(path);
        } catch (...) {
            delete h;
            throw;
        }
        *out = h;
    });
}

hop_status hop_config_set(hop_config* cfg, const char* key, const char* value) {
    if (require(cfg && key && value, "null argument")) return HOP_E_USAGE;
    return guarded([&] { cfg->cfg.set(key, value); });
}

const char* hop_config_get(hop_config* cfg, const char* key) {
    if (!cfg || !key) return nullptr;
    try {
        cfg->scratch = cfg->cfg.get_string(key);
        return cfg->scratch.c_str();
    } catch (...) {
        return nullptr;
    }
}

void hop_config_free(hop_config* cfg) { delete cfg; }

hop_status hop_map_load(const char* image_path, const char* meta_path, hop_map** out) {
    if (require(image_path && meta_path && out, "null argument")) return HOP_E_USAGE;
    return guarded([&] {
        auto* h = new hop_map();
        try {
            h->map = hop::load_map(image_path, meta_path);
        } catch (...) {
            delete h;
            throw;
        }
        *out = h;
    });
}

hop_status hop_map_synth(int width, int height, double px_per_m, uint64_t seed,
                         const char* image_path, const char* meta_path) {
    if (require(image_path && meta_path, "null argument")) return HOP_E_USAGE;
    return guarded([&] {
        hop::GeoMap map = hop::synth_map(width, height, px_per_m, seed);
        hop::write_png_gray(image_path, map.raster);
        nlohmann::ordered_json j;
        j["px_per_m"] = px_per_m;
        j["origin_label"] = "synthetic";
        std::ofstream out(meta_path);
        if (!out) hop::fail_data(std::string("cannot write map meta: ") + meta_path);
        out << j.dump(2) << '\n';
    });
}

int hop_map_width(const hop_map* map) { return map ? map->map.width() : 0; }
int hop_map_height(const hop_map* map) { return map ? map->map.height() : 0; }
double hop_map_px_per_m(const hop_map* map) { return map ? map->map.px_per_m : 0; }
void hop_map_free(hop_map* map) { delete map; }

hop_status hop_table_build(const hop_map* map, const hop_config* cfg, hop_table** out) {
    if (require(map && cfg && out, "null argument")) return HOP_E_USAGE;
    return guarded([&] {
        auto* h = new hop_table();
        try {
            h->table = hop::run_build_table(map->map, cfg->cfg);
        } catch (...) {
            delete h;
            throw;
        }
        *out = h;
    });
}

hop_status hop_table_save(const hop_table* table, const char* path) {
    if (require(table && path, "null argument")) return HOP_E_USAGE;
    return guarded([&] { table->table.save(path); });
}

hop_status hop_table_load(const char* path, hop_table** out) {
    if (require(path && out, "null argument")) return HOP_E_USAGE;
    return guarded([&] {
        auto* h = new hop_table();
        try {
            h->table = hop::HogTable::load(path);
        } catch (...) {
            delete h;
            throw;
        }
        *out = h;
    });
}

uint64_t hop_table_entry_count(const hop_table* table) {
    return table ? table->table.entry_count() : 0;
}

uint32_t hop_table_descriptor_len(const hop_table* table) {
    return table ? uint32_t(table->table.params().descriptor_len()) : 0;
}

void hop_table_free(hop_table* table) { delete table; }

hop_status hop_simulate(const hop_map* map, const hop_config* cfg, const char* out_dir,
                        uint64_t* frames_out) {
    if (require(map && cfg && out_dir, "null argument")) return HOP_E_USAGE;
    return guarded([&] {
        size_t n = hop::run_simulate(map->map, cfg->cfg, out_dir);
        if (frames_out) *frames_out = n;
    });
}

hop_status hop_localize(const hop_map* map, const hop_table* table, const char* dataset_dir,
                        const hop_config* cfg, const char* out_dir,
                        hop_run_summary* summary_out) {
    if (require(map && table && dataset_dir && cfg && out_dir, "null argument"))
        return HOP_E_USAGE;
    return guarded([&] {
        hop::RunSummary s =
            hop::run_localize(map->map, table->table, dataset_dir, cfg->cfg, out_dir);
        if (summary_out) {
            summary_out->frames = s.frames;
            summary_out->registered_fraction = s.registered_fraction;
            summary_out->predicted_fraction = s.predicted_fraction;
            summary_out->reinit_count = s.reinit_count;
            summary_out->wall_s = s.wall_s;
            summary_out->hz = s.hz;
        }
    });
}

hop_status hop_evaluate(const char* trajectory_csv, const char* groundtruth_csv,
                        const char* run_metrics_json, const char* out_dir,
                        hop_eval_summary* summary_out) {
    if (require(trajectory_csv && groundtruth_csv, "null argument")) return HOP_E_USAGE;
    return guarded([&] {
        hop::EvalResult r = hop::run_evaluate(trajectory_csv, groundtruth_csv,
                                              run_metrics_json ? run_metrics_json : "",
                                              out_dir ? out_dir : "");
        if (summary_out) {
            summary_out->frames = r.frames;
            summary_out->rmse_m = r.rmse_m;
            summary_out->mean_err_m = r.mean_err_m;
            summary_out->max_err_m = r.max_err_m;
            summary_out->registered_fraction = r.registered_fraction;
            summary_out->predicted_fraction = r.predicted_fraction;
            summary_out->reinit_count = r.reinit_count;
        }
    });
}

hop_status hop_plot(const char* const* trajectory_csvs, int count, const char* groundtruth_csv,
                    const char* out_svg) {
    if (require(trajectory_csvs && count > 0 && out_svg, "need at least one trajectory"))
        return HOP_E_USAGE;
    return guarded([&] {
        std::vector<std::string> paths;
        for (int i = 0; i < count; ++i) {
            if (!trajectory_csvs[i]) hop::fail_usage("null trajectory path");
            paths.emplace_back(trajectory_csvs[i]);
        }
        hop::plot_svg(paths, groundtruth_csv ? groundtruth_csv : "", out_svg);
    });
}

hop_status hop_calibrate(const hop_map* map, const hop_table* table, const char* dataset_dir,
                         const char* groundtruth_csv, const hop_config* cfg,
                         const char* out_dir, double* suggested_tau_out) {
    if (require(map && table && dataset_dir && groundtruth_csv && cfg, "null argument"))
        return HOP_E_USAGE;
    return guarded([&] {
        hop::CalibrationReport rep = hop::run_calibrate(
            map->map, table->table, dataset_dir, groundtruth_csv, cfg->cfg,
            out_dir ? out_dir : "");
        if (suggested_tau_out) *suggested_tau_out = rep.suggested_tau_d;
    });
}

}  // extern "C"
