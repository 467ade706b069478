#include "galvomosaic/sidecar.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace galvomosaic {

namespace {

constexpr const char* kMagic = "galvomosaic-sidecar 1";

std::string real(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

bool same_overlap(const OverlapRegion& a, const OverlapRegion& b) {
    return a.tile_a == b.tile_a && a.tile_b == b.tile_b && a.rect == b.rect && a.axis == b.axis;
}

OverlapAxis parse_axis(const std::string& s) {
    if (s == "horizontal") return OverlapAxis::Horizontal;
    if (s == "vertical") return OverlapAxis::Vertical;
    throw std::invalid_argument("unknown overlap axis '" + s + "'");
}

SeamOrientation parse_orientation(const std::string& s) {
    if (s == "horizontal") return SeamOrientation::Horizontal;
    if (s == "vertical") return SeamOrientation::Vertical;
    throw std::invalid_argument("unknown seam orientation '" + s + "'");
}

}  // namespace

bool MosaicSidecar::operator==(const MosaicSidecar& o) const {
    if (canvas_width != o.canvas_width || canvas_height != o.canvas_height ||
        tile.width != o.tile.width || tile.height != o.tile.height || mode != o.mode ||
        correction != o.correction || feather != o.feather || placements != o.placements ||
        seams != o.seams || regions != o.regions || overlaps.size() != o.overlaps.size() ||
        maes.size() != o.maes.size()) {
        return false;
    }
    for (std::size_t k = 0; k < overlaps.size(); ++k) {
        if (!same_overlap(overlaps[k], o.overlaps[k])) return false;
    }
    for (std::size_t k = 0; k < maes.size(); ++k) {
        if (maes[k].pair_id != o.maes[k].pair_id || maes[k].mae != o.maes[k].mae ||
            maes[k].degenerate_fit != o.maes[k].degenerate_fit) {
            return false;
        }
    }
    return true;
}

std::string to_text(const MosaicSidecar& s) {
    if (s.maes.size() != s.overlaps.size()) {
        throw std::invalid_argument("sidecar: one MAE entry per overlap required");
    }
    std::ostringstream out;
    out << kMagic << '\n'
        << "canvas " << s.canvas_width << ' ' << s.canvas_height << '\n'
        << "tile " << s.tile.width << ' ' << s.tile.height << '\n'
        << "mode " << s.mode << '\n'
        << "correction " << s.correction << '\n'
        << "feather " << (s.feather ? "on" : "off") << '\n';
    for (const auto& p : s.placements) {
        out << "placement " << p.row << ' ' << p.col << ' ' << real(p.dx) << ' ' << real(p.dy)
            << '\n';
    }
    for (std::size_t k = 0; k < s.overlaps.size(); ++k) {
        const auto& o = s.overlaps[k];
        const auto& m = s.maes[k];
        out << "overlap " << o.tile_a << ' ' << o.tile_b << ' ' << to_string(o.axis) << ' '
            << o.rect.x0 << ' ' << o.rect.y0 << ' ' << o.rect.width << ' ' << o.rect.height << ' '
            << m.pair_id << ' ' << real(m.mae) << ' ' << (m.degenerate_fit ? 1 : 0) << '\n';
    }
    for (const auto& seam : s.seams) {
        out << "seam " << to_string(seam.orientation) << ' ' << seam.position << ' '
            << seam.extent_begin << ' ' << seam.extent_end << '\n';
    }
    for (const auto& r : s.regions) {
        out << "region " << r.name << ' ' << to_string(r.kind) << ' ' << r.rect.x0 << ' '
            << r.rect.y0 << ' ' << r.rect.width << ' ' << r.rect.height << '\n';
    }
    return out.str();
}

MosaicSidecar parse_sidecar(const std::string& text, const std::string& source) {
    MosaicSidecar s;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    auto fail = [&](const std::string& why) {
        throw std::runtime_error(source + ":" + std::to_string(line_no) + ": " + why);
    };

    if (!std::getline(in, line) || line != kMagic) {
        line_no = 1;
        fail("not a galvomosaic sidecar");
    }
    line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string tag;
        ls >> tag;
        try {
            if (tag == "canvas") {
                ls >> s.canvas_width >> s.canvas_height;
            } else if (tag == "tile") {
                ls >> s.tile.width >> s.tile.height;
            } else if (tag == "mode") {
                ls >> s.mode;
            } else if (tag == "correction") {
                ls >> s.correction;
            } else if (tag == "feather") {
                std::string v;
                ls >> v;
                if (v != "on" && v != "off") fail("feather must be on or off");
                s.feather = v == "on";
            } else if (tag == "placement") {
                TilePlacement p;
                std::string dx;
                std::string dy;
                ls >> p.row >> p.col >> dx >> dy;
                p.dx = std::stod(dx);
                p.dy = std::stod(dy);
                s.placements.push_back(p);
            } else if (tag == "overlap") {
                OverlapRegion o;
                OverlapMae m;
                std::string axis;
                std::string mae;
                int degenerate = 0;
                ls >> o.tile_a >> o.tile_b >> axis >> o.rect.x0 >> o.rect.y0 >> o.rect.width >>
                    o.rect.height >> m.pair_id >> mae >> degenerate;
                o.axis = parse_axis(axis);
                m.mae = std::stod(mae);
                m.degenerate_fit = degenerate != 0;
                s.overlaps.push_back(o);
                s.maes.push_back(m);
            } else if (tag == "seam") {
                SeamLine seam;
                std::string orient;
                ls >> orient >> seam.position >> seam.extent_begin >> seam.extent_end;
                seam.orientation = parse_orientation(orient);
                s.seams.push_back(seam);
            } else if (tag == "region") {
                RegionSpec r;
                std::string kind;
                ls >> r.name >> kind >> r.rect.x0 >> r.rect.y0 >> r.rect.width >> r.rect.height;
                r.kind = parse_region_kind(kind);
                s.regions.push_back(r);
            } else {
                fail("unknown record '" + tag + "'");
            }
        } catch (const std::logic_error& e) {
            fail(e.what());
        }
        if (ls.fail()) fail("malformed '" + tag + "' record");
    }
    const auto n = static_cast<int>(s.placements.size());
    for (const auto& o : s.overlaps) {
        if (o.tile_a < 0 || o.tile_a >= n || o.tile_b < 0 || o.tile_b >= n) {
            throw std::runtime_error(source + ": overlap refers to an unknown tile");
        }
    }
    return s;
}

MosaicSidecar read_sidecar(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error(path.string() + ": cannot open sidecar");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_sidecar(ss.str(), path.string());
}

void write_sidecar(const std::filesystem::path& path, const MosaicSidecar& s) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error(path.string() + ": cannot open for writing");
    out << to_text(s);
}

}  // namespace galvomosaic
