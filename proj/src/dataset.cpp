#include "galvomosaic/dataset.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "galvomosaic/errors.hpp"

namespace galvomosaic {

using nlohmann::ordered_json;

namespace {

template <typename F>
auto as_config_error(const std::string& key, F&& f) {
    try {
        return f();
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(key, e.what());
    }
}

std::string format_real(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

ordered_json rect_json(const RectRoi& r) { return ordered_json::array({r.x0, r.y0, r.width, r.height}); }

RectRoi rect_from_json(const ordered_json& j) {
    if (!j.is_array() || j.size() != 4) throw std::runtime_error("rectangle must be [x0, y0, w, h]");
    return RectRoi{j[0].get<int>(), j[1].get<int>(), j[2].get<int>(), j[3].get<int>()};
}

ordered_json optional_json(const std::optional<double>& v) {
    return v ? ordered_json(*v) : ordered_json();
}

std::optional<double> optional_from_json(const ordered_json& j) {
    if (j.is_null()) return std::nullopt;
    return j.get<double>();
}

}  // namespace

std::vector<RectRoi> RunConfig::effective_rois() const {
    return rois.empty() ? default_rois(scan.strategy, scan.tile_width, scan.tile_height) : rois;
}

void RunConfig::validate() const {
    scan.validate();
    degradation.validate();
    for (const auto& r : rois) {
        if (!r.fits_within(scan.tile_width, scan.tile_height)) {
            throw ConfigError("roi", "ROI " + std::to_string(r.width) + "x" +
                                         std::to_string(r.height) + "+" + std::to_string(r.x0) +
                                         "+" + std::to_string(r.y0) + " exceeds the tile");
        }
    }
    if (band_px < 1) throw ConfigError("band_px", "must be >= 1");
    if (!(epsilon > 0.0)) throw ConfigError("epsilon", "must be > 0");
    if (!(per_frame_ms >= scan.settle_ms)) {
        throw ConfigError("per_frame_ms", "must be >= settle_ms");
    }
    if (target.pattern == sim::TargetPattern::Bars && target.pitch < 1) {
        throw ConfigError("target_pitch", "must be >= 1");
    }
    if (!(target.value >= 0.0 && target.value <= 1.0)) {
        throw ConfigError("target_value", "must be in [0, 1]");
    }
}

RectRoi parse_rect(const std::string& key, const std::string& text) {
    std::vector<int> v;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            const std::string t = item.substr(item.find_first_not_of(' ') == std::string::npos
                                                  ? 0
                                                  : item.find_first_not_of(' '));
            v.push_back(std::stoi(t, &used));
            if (t.find_first_not_of(' ', used) != std::string::npos) throw 0;
        } catch (...) {
            throw ConfigError(key, "expected 'x0, y0, width, height', got '" + text + "'");
        }
    }
    if (v.size() != 4 || v[0] < 0 || v[1] < 0 || v[2] < 1 || v[3] < 1) {
        throw ConfigError(key, "expected 'x0, y0, width, height' with positive size, got '" +
                                   text + "'");
    }
    return RectRoi{v[0], v[1], v[2], v[3]};
}

ScanConfig parse_scan_config(KeyValueFile& kv) {
    ScanConfig c;
    c.n_rows = kv.get_int("n_rows", c.n_rows);
    c.n_cols = kv.get_int("n_cols", c.n_cols);
    c.dv_x = kv.get_double("dv_x", c.dv_x);
    c.dv_y = kv.get_double("dv_y", c.dv_y);
    c.s_x = kv.get_double("s_x", c.s_x);
    c.s_y = kv.get_double("s_y", c.s_y);
    c.alpha_x = kv.get_double("alpha_x", c.alpha_x);
    c.alpha_y = kv.get_double("alpha_y", c.alpha_y);
    if (auto s = kv.get("strategy")) {
        c.strategy = as_config_error("strategy", [&] { return parse_strategy(*s); });
    }
    c.v0 = kv.get_optional_double("v0");
    c.amplitude = kv.get_optional_double("amplitude");
    c.tile_width = kv.get_int("tile_width", c.tile_width);
    c.tile_height = kv.get_int("tile_height", c.tile_height);
    c.settle_ms = kv.get_double("settle_ms", c.settle_ms);
    return c;
}

std::string to_key_value(const ScanConfig& c) {
    std::ostringstream out;
    out << "n_rows = " << c.n_rows << '\n'
        << "n_cols = " << c.n_cols << '\n'
        << "dv_x = " << format_real(c.dv_x) << '\n'
        << "dv_y = " << format_real(c.dv_y) << '\n'
        << "s_x = " << format_real(c.s_x) << '\n'
        << "s_y = " << format_real(c.s_y) << '\n'
        << "alpha_x = " << format_real(c.alpha_x) << '\n'
        << "alpha_y = " << format_real(c.alpha_y) << '\n'
        << "strategy = " << to_string(c.strategy) << '\n';
    if (c.v0) out << "v0 = " << format_real(*c.v0) << '\n';
    if (c.amplitude) out << "amplitude = " << format_real(*c.amplitude) << '\n';
    out << "tile_width = " << c.tile_width << '\n'
        << "tile_height = " << c.tile_height << '\n'
        << "settle_ms = " << format_real(c.settle_ms) << '\n';
    return out.str();
}

RunConfig parse_run_config(KeyValueFile& kv) {
    RunConfig rc;
    rc.scan = parse_scan_config(kv);
    for (const auto& r : kv.get_all("roi")) rc.rois.push_back(parse_rect("roi", r));
    rc.band_px = kv.get_int("band_px", rc.band_px);
    rc.epsilon = kv.get_double("epsilon", rc.epsilon);

    auto& d = rc.degradation;
    d.vignette_min = kv.get_double("vignette_min", d.vignette_min);
    d.corner_offset = kv.get_double("corner_offset", d.corner_offset);
    d.gain_jitter = kv.get_double("gain_jitter", d.gain_jitter);
    d.noise_sigma = kv.get_double("noise_sigma", d.noise_sigma);
    const long long seed = kv.get_int64("rng_seed", 0);
    if (seed < 0) throw ConfigError("rng_seed", "must be >= 0");
    d.rng_seed = static_cast<std::uint64_t>(seed);
    d.ref_bright_level = kv.get_double("ref_bright_level", d.ref_bright_level);
    d.ref_dark_level = kv.get_double("ref_dark_level", d.ref_dark_level);
    d.reference_frames = kv.get_int("reference_frames", d.reference_frames);

    if (auto p = kv.get("target")) {
        rc.target.pattern =
            as_config_error("target", [&] { return sim::parse_target_pattern(*p); });
    }
    rc.target.value = kv.get_double("target_value", rc.target.value);
    rc.target.pitch = kv.get_int("target_pitch", rc.target.pitch);
    rc.subpixel_sampling = kv.get_bool("subpixel_sampling", rc.subpixel_sampling);
    rc.per_frame_ms = kv.get_double("per_frame_ms", rc.per_frame_ms);

    const std::pair<const char*, RegionKind> region_keys[] = {
        {"region.signal", RegionKind::Signal},
        {"region.bright", RegionKind::BrightBackground},
        {"region.dark", RegionKind::DarkBackground},
    };
    for (const auto& [key, kind] : region_keys) {
        if (auto v = kv.get(key)) {
            rc.regions.push_back(RegionSpec{std::string(to_string(kind)), parse_rect(key, *v), kind});
        }
    }

    if (auto c = kv.get("correction")) {
        rc.correction = as_config_error("correction", [&] { return parse_correction_mode(*c); });
    }
    rc.feather = kv.get_bool("feather", rc.feather);

    kv.reject_unused();
    rc.validate();
    return rc;
}

RunConfig load_run_config(const std::filesystem::path& path) {
    KeyValueFile kv = KeyValueFile::load(path);
    return parse_run_config(kv);
}

std::vector<TilePlacement> DatasetManifest::placements() const {
    std::vector<TilePlacement> out;
    out.reserve(tiles.size());
    for (const auto& t : tiles) out.push_back(TilePlacement{t.row, t.col, t.dx, t.dy});
    return out;
}

std::string tile_file_name(int row, int col) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "tile_r%02d_c%02d.pgm", row, col);
    return buf;
}

std::string manifest_to_json(const DatasetManifest& m) {
    ordered_json j;
    j["format"] = "galvomosaic-dataset";
    j["version"] = 1;
    const auto& s = m.scan;
    j["scan"] = {
        {"n_rows", s.n_rows},       {"n_cols", s.n_cols},
        {"dv_x", s.dv_x},           {"dv_y", s.dv_y},
        {"s_x", s.s_x},             {"s_y", s.s_y},
        {"alpha_x", s.alpha_x},     {"alpha_y", s.alpha_y},
        {"strategy", std::string(to_string(s.strategy))},
        {"v0", optional_json(s.v0)}, {"amplitude", optional_json(s.amplitude)},
        {"tile_width", s.tile_width}, {"tile_height", s.tile_height},
        {"settle_ms", s.settle_ms},
    };
    ordered_json rois = ordered_json::array();
    for (const auto& r : m.rois) rois.push_back(rect_json(r));
    j["correction"] = {{"rois", rois}, {"band_px", m.band_px}, {"epsilon", m.epsilon}};
    const auto& d = m.degradation;
    j["degradation"] = {
        {"vignette_min", d.vignette_min},       {"corner_offset", d.corner_offset},
        {"gain_jitter", d.gain_jitter},         {"noise_sigma", d.noise_sigma},
        {"rng_seed", d.rng_seed},               {"ref_bright_level", d.ref_bright_level},
        {"ref_dark_level", d.ref_dark_level},   {"reference_frames", d.reference_frames},
        {"subpixel_sampling", m.subpixel_sampling},
    };
    j["target"] = {
        {"pattern", std::string(sim::to_string(m.target.pattern))},
        {"value", m.target.value},
        {"pitch", m.target.pitch},
        {"file", m.truth_file},
        {"width", m.truth_width},
        {"height", m.truth_height},
    };
    j["references"] = {{"bright", m.ref_bright_file}, {"dark", m.ref_dark_file}};
    ordered_json regions = ordered_json::array();
    for (const auto& r : m.regions) {
        regions.push_back({{"name", r.name},
                           {"kind", std::string(to_string(r.kind))},
                           {"rect", rect_json(r.rect)}});
    }
    j["regions"] = regions;
    ordered_json tiles = ordered_json::array();
    for (const auto& t : m.tiles) {
        tiles.push_back(
            {{"row", t.row}, {"col", t.col}, {"file", t.file}, {"dx", t.dx}, {"dy", t.dy}});
    }
    j["tiles"] = tiles;
    j["processing"] = {{"correction", std::string(to_string(m.correction))},
                       {"feather", m.feather}};
    j["timing"] = {
        {"settle_ms", m.settle_ms}, {"per_frame_ms", m.per_frame_ms}, {"total_s", m.total_s}};
    return j.dump(2) + "\n";
}

DatasetManifest manifest_from_json(const std::string& text) {
    DatasetManifest m;
    try {
        const ordered_json j = ordered_json::parse(text);
        if (j.value("format", "") != "galvomosaic-dataset") {
            throw std::runtime_error("not a galvomosaic dataset manifest");
        }
        const auto& s = j.at("scan");
        m.scan.n_rows = s.at("n_rows").get<int>();
        m.scan.n_cols = s.at("n_cols").get<int>();
        m.scan.dv_x = s.at("dv_x").get<double>();
        m.scan.dv_y = s.at("dv_y").get<double>();
        m.scan.s_x = s.at("s_x").get<double>();
        m.scan.s_y = s.at("s_y").get<double>();
        m.scan.alpha_x = s.at("alpha_x").get<double>();
        m.scan.alpha_y = s.at("alpha_y").get<double>();
        m.scan.strategy = parse_strategy(s.at("strategy").get<std::string>());
        m.scan.v0 = optional_from_json(s.at("v0"));
        m.scan.amplitude = optional_from_json(s.at("amplitude"));
        m.scan.tile_width = s.at("tile_width").get<int>();
        m.scan.tile_height = s.at("tile_height").get<int>();
        m.scan.settle_ms = s.at("settle_ms").get<double>();

        const auto& c = j.at("correction");
        for (const auto& r : c.at("rois")) m.rois.push_back(rect_from_json(r));
        m.band_px = c.at("band_px").get<int>();
        m.epsilon = c.at("epsilon").get<double>();

        const auto& d = j.at("degradation");
        m.degradation.vignette_min = d.at("vignette_min").get<double>();
        m.degradation.corner_offset = d.at("corner_offset").get<double>();
        m.degradation.gain_jitter = d.at("gain_jitter").get<double>();
        m.degradation.noise_sigma = d.at("noise_sigma").get<double>();
        m.degradation.rng_seed = d.at("rng_seed").get<std::uint64_t>();
        m.degradation.ref_bright_level = d.at("ref_bright_level").get<double>();
        m.degradation.ref_dark_level = d.at("ref_dark_level").get<double>();
        m.degradation.reference_frames = d.at("reference_frames").get<int>();
        m.subpixel_sampling = d.at("subpixel_sampling").get<bool>();

        const auto& t = j.at("target");
        m.target.pattern = sim::parse_target_pattern(t.at("pattern").get<std::string>());
        m.target.value = t.at("value").get<double>();
        m.target.pitch = t.at("pitch").get<int>();
        m.truth_file = t.at("file").get<std::string>();
        m.truth_width = t.at("width").get<int>();
        m.truth_height = t.at("height").get<int>();

        m.ref_bright_file = j.at("references").at("bright").get<std::string>();
        m.ref_dark_file = j.at("references").at("dark").get<std::string>();

        for (const auto& r : j.at("regions")) {
            m.regions.push_back(RegionSpec{r.at("name").get<std::string>(),
                                           rect_from_json(r.at("rect")),
                                           parse_region_kind(r.at("kind").get<std::string>())});
        }
        for (const auto& e : j.at("tiles")) {
            m.tiles.push_back(DatasetManifest::TileEntry{
                e.at("row").get<int>(), e.at("col").get<int>(), e.at("file").get<std::string>(),
                e.at("dx").get<double>(), e.at("dy").get<double>()});
        }
        const auto& pr = j.at("processing");
        m.correction = parse_correction_mode(pr.at("correction").get<std::string>());
        m.feather = pr.at("feather").get<bool>();
        const auto& tm = j.at("timing");
        m.settle_ms = tm.at("settle_ms").get<double>();
        m.per_frame_ms = tm.at("per_frame_ms").get<double>();
        m.total_s = tm.at("total_s").get<double>();
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error(std::string("malformed manifest: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw std::runtime_error(std::string("malformed manifest: ") + e.what());
    }

    std::set<std::pair<int, int>> seen;
    for (const auto& t : m.tiles) {
        if (t.row < 0 || t.row >= m.scan.n_rows || t.col < 0 || t.col >= m.scan.n_cols) {
            throw std::runtime_error("manifest tile (" + std::to_string(t.row) + ", " +
                                     std::to_string(t.col) + ") outside the scan grid");
        }
        if (!seen.insert({t.row, t.col}).second) {
            throw std::runtime_error("manifest lists tile (" + std::to_string(t.row) + ", " +
                                     std::to_string(t.col) + ") twice");
        }
    }
    if (seen.size() != static_cast<std::size_t>(m.scan.n_rows) * m.scan.n_cols) {
        std::string missing;
        for (int i = 0; i < m.scan.n_rows; ++i) {
            for (int jj = 0; jj < m.scan.n_cols; ++jj) {
                if (!seen.count({i, jj})) {
                    missing += " (" + std::to_string(i) + ", " + std::to_string(jj) + ")";
                }
            }
        }
        throw std::runtime_error("manifest is missing tiles:" + missing);
    }
    return m;
}

DatasetManifest read_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error(path.string() + ": cannot open manifest");
    std::ostringstream ss;
    ss << in.rdbuf();
    return manifest_from_json(ss.str());
}

void write_manifest(const std::filesystem::path& path, const DatasetManifest& m) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error(path.string() + ": cannot open for writing");
    out << manifest_to_json(m);
}

}  // namespace galvomosaic
