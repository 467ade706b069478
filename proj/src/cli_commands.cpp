#include "galvomosaic/cli_commands.hpp"

#include <fstream>
#include <iostream>
#include <stdexcept>

#include <CLI11.hpp>

#include "galvomosaic/errors.hpp"
#include "galvomosaic/mosaic_compose.hpp"
#include "galvomosaic/pgm_io.hpp"
#include "galvomosaic/scan_simulator.hpp"

namespace galvomosaic::cli {

namespace {

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) {
        throw std::runtime_error(dir.string() + ": cannot create output directory");
    }
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::trunc | std::ios::binary);
    if (!out) throw std::runtime_error(path.string() + ": cannot open for writing");
    out << text;
    if (!out) throw std::runtime_error(path.string() + ": write failed");
}

Image16 read_image(const fs::path& path) {
    if (!fs::exists(path)) throw std::runtime_error(path.string() + ": file not found");
    return io::read_pgm(path);
}

}  // namespace

std::string_view to_string(StitchMode m) { return m == StitchMode::Raw ? "raw" : "processed"; }

StitchMode parse_stitch_mode(std::string_view text) {
    if (text == "raw") return StitchMode::Raw;
    if (text == "processed") return StitchMode::Processed;
    throw std::invalid_argument("unknown mode '" + std::string(text) + "' (raw, processed)");
}

DatasetManifest cmd_simulate(const SimulateOptions& opts, std::ostream* log) {
    RunConfig rc;
    if (!opts.config.empty()) rc = load_run_config(opts.config);
    if (opts.strategy) rc.scan.strategy = *opts.strategy;
    if (opts.seed) rc.degradation.rng_seed = *opts.seed;
    rc.validate();

    const auto placements = placement_table(rc.scan);
    const TileDims dims{rc.scan.tile_width, rc.scan.tile_height};
    const auto [canvas_w, canvas_h] = canvas_dims(placements, dims);
    const auto rois = rc.effective_rois();

    DatasetManifest m;
    m.scan = rc.scan;
    m.rois = rois;
    m.band_px = rc.band_px;
    m.epsilon = rc.epsilon;
    m.degradation = rc.degradation;
    m.target = rc.target;
    m.subpixel_sampling = rc.subpixel_sampling;
    m.truth_width = canvas_w;
    m.truth_height = canvas_h;
    m.regions = rc.regions.empty() ? sim::target_regions(canvas_w, canvas_h) : rc.regions;
    for (const auto& r : m.regions) {
        if (!r.rect.fits_within(canvas_w, canvas_h)) {
            throw ConfigError("region." + r.name, "region lies outside the " +
                                                       std::to_string(canvas_w) + "x" +
                                                       std::to_string(canvas_h) + " canvas");
        }
    }
    m.settle_ms = rc.scan.settle_ms;
    m.per_frame_ms = rc.per_frame_ms;
    m.total_s = sim::timing_report(rc.scan, rc.per_frame_ms);
    m.correction = rc.correction;
    m.feather = rc.feather;

    ensure_dir(opts.out);
    const ImageF truth = sim::make_target(canvas_w, canvas_h, rc.target);
    io::write_pgm(opts.out / m.truth_file, to_storage(truth));

    const ImageF vignette = sim::vignette_field(dims.width, dims.height, rc.degradation.vignette_min);
    for (const auto& p : placements) {
        sim::Tile tile = sim::extract_tile(truth, p, dims, rc.subpixel_sampling);
        sim::degrade_tile(tile, rc.degradation, rois, vignette);
        const std::string file = tile_file_name(p.row, p.col);
        io::write_pgm(opts.out / file, to_storage(tile.pixels));
        m.tiles.push_back(DatasetManifest::TileEntry{p.row, p.col, file, p.dx, p.dy});
    }

    const sim::References refs = sim::make_references(dims, rc.degradation, rois);
    io::write_pgm(opts.out / m.ref_bright_file, to_storage(refs.bright));
    io::write_pgm(opts.out / m.ref_dark_file, to_storage(refs.dark));
    write_manifest(opts.out / "manifest.json", m);

    if (log) {
        *log << "simulated " << m.tiles.size() << " tiles (" << to_string(rc.scan.strategy)
             << "), canvas " << canvas_w << "x" << canvas_h << ", acquisition " << m.total_s
             << " s -> " << opts.out.string() << '\n';
    }
    return m;
}

MosaicSidecar cmd_stitch(const StitchOptions& opts, std::ostream* log) {
    const fs::path manifest_path = opts.dataset / "manifest.json";
    if (!fs::exists(manifest_path)) {
        throw std::runtime_error(manifest_path.string() + ": manifest not found");
    }
    const DatasetManifest m = read_manifest(manifest_path);

    std::string missing;
    for (const auto& t : m.tiles) {
        if (!fs::exists(opts.dataset / t.file)) {
            missing += " (" + std::to_string(t.row) + ", " + std::to_string(t.col) + ")";
        }
    }
    if (!missing.empty()) {
        throw std::runtime_error(opts.dataset.string() + ": missing tiles" + missing);
    }

    const bool processed = opts.mode == StitchMode::Processed;
    const CorrectionMode correction =
        opts.correction.value_or(processed ? m.correction : CorrectionMode::Off);
    const bool feather = opts.feather.value_or(processed ? m.feather : false);
    const TileDims dims{m.scan.tile_width, m.scan.tile_height};

    TileCorrector corrector;
    if (correction != CorrectionMode::Off) {
        const ImageF bright = to_normalized(read_image(opts.dataset / m.ref_bright_file));
        std::optional<ImageF> dark;
        if (correction == CorrectionMode::TwoPoint) {
            dark = to_normalized(read_image(opts.dataset / m.ref_dark_file));
        }
        corrector = TileCorrector(correction, bright, dark, m.rois, m.band_px, m.epsilon);
    }

    const auto placements = m.placements();
    std::vector<Image16> tiles;
    tiles.reserve(m.tiles.size());
    for (const auto& t : m.tiles) {
        const fs::path path = opts.dataset / t.file;
        Image16 raw = read_image(path);
        if (raw.width() != dims.width || raw.height() != dims.height) {
            throw std::runtime_error(path.string() + ": expected " + std::to_string(dims.width) +
                                     "x" + std::to_string(dims.height) + " tile");
        }
        if (correction != CorrectionMode::Off) raw = to_storage(corrector.apply(to_normalized(raw)));
        tiles.push_back(std::move(raw));
    }

    const auto overlaps = compute_overlaps(placements, dims);
    const TileSource source = [&](std::size_t k) { return to_normalized(tiles[k]); };
    const MosaicCanvas canvas = feather ? compose_feathered(source, placements, overlaps, dims)
                                        : compose_raw(source, placements, dims);
    const Image16 mosaic = canvas.finalize_storage();

    MosaicSidecar sc;
    sc.canvas_width = canvas.width();
    sc.canvas_height = canvas.height();
    sc.tile = dims;
    sc.mode = std::string(to_string(opts.mode));
    sc.correction = std::string(to_string(correction));
    sc.feather = feather;
    sc.placements = placements;
    sc.overlaps = overlaps;
    sc.maes = overlap_maes(tiles, placements, sc.overlaps);
    sc.seams = derive_seams(placements, dims);
    sc.regions = m.regions;

    ensure_dir(opts.out);
    io::write_pgm(opts.out / "mosaic.pgm", mosaic);
    if (opts.png) io::write_png(opts.out / "mosaic.png", mosaic);
    write_sidecar(opts.out / "mosaic.sidecar", sc);

    if (log) {
        *log << "stitched " << tiles.size() << " tiles (" << sc.mode << ", correction "
             << sc.correction << ", feather " << (feather ? "on" : "off") << "), canvas "
             << sc.canvas_width << "x" << sc.canvas_height << " -> " << opts.out.string() << '\n';
    }
    return sc;
}

MetricsReport cmd_evaluate(const EvaluateOptions& opts, std::ostream* log) {
    const Image16 stored = read_image(opts.mosaic);
    if (!fs::exists(opts.sidecar)) throw std::runtime_error(opts.sidecar.string() + ": file not found");
    const MosaicSidecar sc = read_sidecar(opts.sidecar);
    if (stored.width() != sc.canvas_width || stored.height() != sc.canvas_height) {
        throw std::runtime_error(opts.mosaic.string() + ": size " + std::to_string(stored.width()) +
                                 "x" + std::to_string(stored.height()) +
                                 " does not match the sidecar canvas " +
                                 std::to_string(sc.canvas_width) + "x" +
                                 std::to_string(sc.canvas_height));
    }

    std::vector<RegionSpec> regions = sc.regions;
    if (!opts.config.empty()) {
        RunConfig rc = load_run_config(opts.config);
        if (!rc.regions.empty()) regions = rc.regions;
    }
    for (const auto& r : regions) {
        if (!r.rect.fits_within(stored.width(), stored.height())) {
            throw ConfigError("region." + r.name,
                              "region " + std::to_string(r.rect.width) + "x" +
                                  std::to_string(r.rect.height) + "+" + std::to_string(r.rect.x0) +
                                  "+" + std::to_string(r.rect.y0) + " lies outside the " +
                                  std::to_string(stored.width()) + "x" +
                                  std::to_string(stored.height()) + " mosaic");
        }
    }

    const ImageF counts = to_counts(stored);
    MetricsReport report = evaluate_mosaic(counts, sc.seams, regions, sc.maes);

    ensure_dir(opts.out);
    write_text(opts.out / "report.txt", to_key_value(report));
    write_text(opts.out / "report.json", to_json(report));

    if (log) {
        *log << "evaluated " << opts.mosaic.string() << " -> " << opts.out.string() << '\n';
        for (const auto& e : report.errors) *log << "  not computed: " << e << '\n';
    }
    return report;
}

int run(int argc, char** argv) {
    CLI::App app{"Galvo-scan mosaic simulation, stitching and evaluation"};
    app.require_subcommand(1);

    std::string config;
    std::string out = ".";
    std::string strategy;
    std::optional<std::uint64_t> seed;
    auto* simulate = app.add_subcommand("simulate", "Generate a synthetic tile dataset");
    simulate->add_option("--config", config, "Key-value config file")->check(CLI::ExistingFile);
    simulate->add_option("--out", out, "Output directory");
    simulate->add_option("--strategy", strategy, "Scan strategy override")
        ->check(CLI::IsMember({"linear", "sinusoidal"}));
    simulate->add_option("--seed", seed, "Random seed override");

    std::string dataset;
    std::string mode = "processed";
    std::string correction;
    std::string feather;
    bool png = false;
    auto* stitch = app.add_subcommand("stitch", "Compose a dataset into a mosaic");
    stitch->add_option("--dataset", dataset, "Dataset directory")->required();
    stitch->add_option("--out", out, "Output directory");
    stitch->add_option("--mode", mode, "raw or processed")
        ->check(CLI::IsMember({"raw", "processed"}));
    stitch->add_option("--correction", correction, "Brightness correction override")
        ->check(CLI::IsMember({"two-point", "bright-only", "off"}));
    stitch->add_option("--feather", feather, "Seam feathering override")
        ->check(CLI::IsMember({"on", "off"}));
    stitch->add_flag("--png", png, "Also write mosaic.png");

    std::string mosaic;
    std::string sidecar;
    auto* evaluate = app.add_subcommand("evaluate", "Compute mosaic quality metrics");
    evaluate->add_option("--mosaic", mosaic, "Mosaic image (PGM)")->required();
    evaluate->add_option("--sidecar", sidecar, "Sidecar file (default: next to the mosaic)");
    evaluate->add_option("--config", config, "Config with region.* overrides");
    evaluate->add_option("--out", out, "Output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (*simulate) {
            SimulateOptions o{config, out, seed, std::nullopt};
            if (!strategy.empty()) o.strategy = parse_strategy(strategy);
            cmd_simulate(o, &std::cout);
        } else if (*stitch) {
            StitchOptions o;
            o.dataset = dataset;
            o.out = out;
            o.mode = parse_stitch_mode(mode);
            if (!correction.empty()) o.correction = parse_correction_mode(correction);
            if (!feather.empty()) o.feather = feather == "on";
            o.png = png;
            cmd_stitch(o, &std::cout);
        } else if (*evaluate) {
            EvaluateOptions o;
            o.mosaic = mosaic;
            o.sidecar = sidecar.empty() ? fs::path(mosaic).replace_extension(".sidecar")
                                        : fs::path(sidecar);
            o.config = config;
            o.out = out;
            const MetricsReport r = cmd_evaluate(o, &std::cout);
            if (!r.errors.empty()) return 2;
        }
    } catch (const std::exception& e) {
        std::cerr << "galvomosaic: error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

}  // namespace galvomosaic::cli
