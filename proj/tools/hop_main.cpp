// Command-line front end. Everything goes through the public C API in
// hop/hop.h; subcommands map 1:1 onto its entry points.

#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hop/hop.h"

namespace {

struct ConfigHandle {
    hop_config* cfg = nullptr;
    ~ConfigHandle() { hop_config_free(cfg); }
};
struct MapHandle {
    hop_map* map = nullptr;
    ~MapHandle() { hop_map_free(map); }
};
struct TableHandle {
    hop_table* table = nullptr;
    ~TableHandle() { hop_table_free(table); }
};

struct CommonOpts {
    std::string config_path;
    std::string out_dir = ".";
    std::string mode;
    uint64_t seed = 0;
    bool seed_set = false;
    bool emit_confidence = false;
    bool quiet = false;
};

int die(hop_status st) {
    std::fprintf(stderr, "error: %s\n", hop_last_error());
    return int(st);
}

#define CHECK(call)                      \
    do {                                 \
        hop_status st_ = (call);         \
        if (st_ != HOP_OK) return die(st_); \
    } while (0)

int load_config(const CommonOpts& opts, ConfigHandle& cfg) {
    if (!opts.config_path.empty())
        CHECK(hop_config_load(opts.config_path.c_str(), &cfg.cfg));
    else
        CHECK(hop_config_create(&cfg.cfg));
    if (opts.seed_set) {
        std::string s = std::to_string(opts.seed);
        CHECK(hop_config_set(cfg.cfg, "run.seed", s.c_str()));
        CHECK(hop_config_set(cfg.cfg, "sim.seed", s.c_str()));
    }
    if (!opts.mode.empty()) CHECK(hop_config_set(cfg.cfg, "run.mode", opts.mode.c_str()));
    if (opts.emit_confidence)
        CHECK(hop_config_set(cfg.cfg, "run.emit_confidence_maps", "true"));
    return -1;  // keep going
}

std::string cfg_str(hop_config* cfg, const char* key) {
    const char* v = hop_config_get(cfg, key);
    return v ? v : "";
}

// map paths come from flags when given, else from the config
int open_map(const CommonOpts&, ConfigHandle& cfg, std::string map_image,
             std::string map_meta, MapHandle& map) {
    if (map_image.empty()) map_image = cfg_str(cfg.cfg, "paths.map_image");
    if (map_image.empty()) {
        std::fprintf(stderr, "error: no map image given (flag --map or key paths.map_image)\n");
        return HOP_E_USAGE;
    }
    if (map_meta.empty()) map_meta = cfg_str(cfg.cfg, "paths.map_meta");
    if (map_meta.empty())
        map_meta = std::filesystem::path(map_image).replace_extension(".json").string();

    // simulate can synthesize the reference map on first use
    std::string synth = cfg_str(cfg.cfg, "sim.synth_map");
    if (!synth.empty() && !std::filesystem::exists(map_image)) {
        int w = 0, h = 0;
        if (std::sscanf(synth.c_str(), "%dx%d", &w, &h) != 2) {
            std::fprintf(stderr, "error: sim.synth_map must be WxH, got '%s'\n", synth.c_str());
            return HOP_E_USAGE;
        }
        double ppm = std::stod(cfg_str(cfg.cfg, "sim.synth_map.px_per_m"));
        uint64_t seed = std::stoull(cfg_str(cfg.cfg, "sim.seed"));
        CHECK(hop_map_synth(w, h, ppm, seed, map_image.c_str(), map_meta.c_str()));
    }
    CHECK(hop_map_load(map_image.c_str(), map_meta.c_str(), &map.map));
    return -1;
}

int open_table(ConfigHandle& cfg, MapHandle& map, std::string table_path, TableHandle& table,
               bool quiet) {
    if (table_path.empty()) table_path = cfg_str(cfg.cfg, "paths.table");
    if (!table_path.empty() && std::filesystem::exists(table_path)) {
        CHECK(hop_table_load(table_path.c_str(), &table.table));
        return -1;
    }
    if (!quiet) std::fprintf(stderr, "building descriptor table...\n");
    CHECK(hop_table_build(map.map, cfg.cfg, &table.table));
    if (!table_path.empty()) CHECK(hop_table_save(table.table, table_path.c_str()));
    return -1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"hop — geo-referenced UAV localization against a reference map"};
    app.require_subcommand(1);

    CommonOpts opts;
    std::string map_image, map_meta, dataset_dir, table_path;
    std::string trajectory_csv, groundtruth_csv, run_metrics, out_svg;
    std::vector<std::string> trajectory_csvs;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", opts.config_path, "configuration file");
        sub->add_option("--out", opts.out_dir, "output directory");
        sub->add_option("--seed", opts.seed, "override run.seed / sim.seed")
            ->each([&](const std::string&) { opts.seed_set = true; });
        sub->add_flag("--quiet", opts.quiet, "suppress progress output");
    };

    CLI::App* simulate = app.add_subcommand("simulate", "render a synthetic flight dataset");
    add_common(simulate);
    simulate->add_option("--map", map_image, "reference map PNG");
    simulate->add_option("--map-meta", map_meta, "map meta JSON");

    CLI::App* build_table = app.add_subcommand("build-table", "precompute the map descriptor table");
    add_common(build_table);
    build_table->add_option("--map", map_image, "reference map PNG")->required();
    build_table->add_option("--map-meta", map_meta, "map meta JSON");
    build_table->add_option("--table", table_path, "table cache file to write");

    CLI::App* localize = app.add_subcommand("localize", "register a dataset against the map");
    add_common(localize);
    localize->add_option("--map", map_image, "reference map PNG");
    localize->add_option("--map-meta", map_meta, "map meta JSON");
    localize->add_option("--dataset", dataset_dir, "dataset directory");
    localize->add_option("--table", table_path, "table cache file (loaded if present)");
    localize->add_option("--mode", opts.mode, "hop | hop_no_of | of_only");
    localize->add_flag("--emit-confidence-maps", opts.emit_confidence,
                       "dump global-search confidence maps as PGM");

    CLI::App* evaluate = app.add_subcommand("evaluate", "compare a trajectory with ground truth");
    add_common(evaluate);
    evaluate->add_option("--trajectory", trajectory_csv, "trajectory CSV")->required();
    evaluate->add_option("--groundtruth", groundtruth_csv, "ground-truth CSV")->required();
    evaluate->add_option("--run-metrics", run_metrics, "metrics.json from localize (merges wall_s/hz)");

    CLI::App* plot = app.add_subcommand("plot", "render trajectories as an SVG figure");
    add_common(plot);
    plot->add_option("--trajectory", trajectory_csvs, "trajectory CSV (repeatable)")->required();
    plot->add_option("--groundtruth", groundtruth_csv, "ground-truth CSV");
    plot->add_option("--out-svg", out_svg, "output SVG path")->required();

    CLI::App* calibrate = app.add_subcommand(
        "calibrate", "match/non-match distance histograms and a suggested tau_d");
    add_common(calibrate);
    calibrate->add_option("--map", map_image, "reference map PNG");
    calibrate->add_option("--map-meta", map_meta, "map meta JSON");
    calibrate->add_option("--dataset", dataset_dir, "dataset directory");
    calibrate->add_option("--groundtruth", groundtruth_csv, "ground-truth CSV")->required();
    calibrate->add_option("--table", table_path, "table cache file (loaded if present)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : HOP_E_USAGE;
    }

    ConfigHandle cfg;
    if (int rc = load_config(opts, cfg); rc >= 0) return rc;

    if (simulate->parsed()) {
        MapHandle map;
        if (int rc = open_map(opts, cfg, map_image, map_meta, map); rc >= 0) return rc;
        uint64_t frames = 0;
        CHECK(hop_simulate(map.map, cfg.cfg, opts.out_dir.c_str(), &frames));
        if (!opts.quiet)
            std::printf("simulated %" PRIu64 " frames into %s\n", frames, opts.out_dir.c_str());
        return 0;
    }

    if (build_table->parsed()) {
        MapHandle map;
        if (int rc = open_map(opts, cfg, map_image, map_meta, map); rc >= 0) return rc;
        TableHandle table;
        CHECK(hop_table_build(map.map, cfg.cfg, &table.table));
        if (table_path.empty())
            table_path = (std::filesystem::path(opts.out_dir) / "map_table.hoptbl").string();
        CHECK(hop_table_save(table.table, table_path.c_str()));
        if (!opts.quiet)
            std::printf("table: %" PRIu64 " entries, descriptor length %u -> %s\n",
                        hop_table_entry_count(table.table),
                        hop_table_descriptor_len(table.table), table_path.c_str());
        return 0;
    }

    if (localize->parsed()) {
        if (dataset_dir.empty()) dataset_dir = cfg_str(cfg.cfg, "paths.dataset");
        if (dataset_dir.empty()) {
            std::fprintf(stderr, "error: no dataset given (flag --dataset or key paths.dataset)\n");
            return HOP_E_USAGE;
        }
        MapHandle map;
        if (int rc = open_map(opts, cfg, map_image, map_meta, map); rc >= 0) return rc;
        TableHandle table;
        if (int rc = open_table(cfg, map, table_path, table, opts.quiet); rc >= 0) return rc;
        hop_run_summary s{};
        CHECK(hop_localize(map.map, table.table, dataset_dir.c_str(), cfg.cfg,
                           opts.out_dir.c_str(), &s));
        if (!opts.quiet) {
            std::printf("frames:      %" PRIu64 "\n", s.frames);
            std::printf("registered:  %.1f%%\n", 100.0 * s.registered_fraction);
            std::printf("predicted:   %.1f%%\n", 100.0 * s.predicted_fraction);
            std::printf("reinits:     %" PRIu64 "\n", s.reinit_count);
            std::printf("wall time:   %.2f s (%.1f Hz)\n", s.wall_s, s.hz);
        }
        return 0;
    }

    if (evaluate->parsed()) {
        hop_eval_summary s{};
        CHECK(hop_evaluate(trajectory_csv.c_str(), groundtruth_csv.c_str(),
                           run_metrics.empty() ? nullptr : run_metrics.c_str(),
                           opts.out_dir.c_str(), &s));
        if (!opts.quiet) {
            std::printf("frames:          %" PRIu64 "\n", s.frames);
            std::printf("rmse:            %.3f m\n", s.rmse_m);
            std::printf("mean error:      %.3f m\n", s.mean_err_m);
            std::printf("max error:       %.3f m\n", s.max_err_m);
            std::printf("registered:      %.1f%%\n", 100.0 * s.registered_fraction);
            std::printf("reference: hop=6.773 m, of_only=169.188 m (original flight benchmark)\n");
        }
        return 0;
    }

    if (plot->parsed()) {
        std::vector<const char*> ptrs;
        for (const auto& p : trajectory_csvs) ptrs.push_back(p.c_str());
        CHECK(hop_plot(ptrs.data(), int(ptrs.size()),
                       groundtruth_csv.empty() ? nullptr : groundtruth_csv.c_str(),
                       out_svg.c_str()));
        if (!opts.quiet) std::printf("wrote %s\n", out_svg.c_str());
        return 0;
    }

    if (calibrate->parsed()) {
        if (dataset_dir.empty()) dataset_dir = cfg_str(cfg.cfg, "paths.dataset");
        MapHandle map;
        if (int rc = open_map(opts, cfg, map_image, map_meta, map); rc >= 0) return rc;
        TableHandle table;
        if (int rc = open_table(cfg, map, table_path, table, opts.quiet); rc >= 0) return rc;
        double tau = 0;
        CHECK(hop_calibrate(map.map, table.table, dataset_dir.c_str(), groundtruth_csv.c_str(),
                            cfg.cfg, opts.out_dir.c_str(), &tau));
        if (!opts.quiet) std::printf("suggested search.tau_d: %.3f\n", tau);
        return 0;
    }

    return HOP_E_USAGE;
}
