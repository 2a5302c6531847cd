#include "uncross/io.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>

namespace uncross {

namespace {

using json = nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& path, const std::string& message) {
    throw IoError(path + ": " + message);
}

const json& require(const json& j, const char* key, const std::string& path,
                    const std::string& where) {
    const auto it = j.find(key);
    if (it == j.end()) fail(path, where + " is missing field '" + key + "'");
    return *it;
}

double as_number(const json& j, const std::string& path, const std::string& where) {
    if (!j.is_number()) fail(path, where + " must be a number");
    return j.get<double>();
}

int as_integer(const json& j, const std::string& path, const std::string& where) {
    if (!j.is_number_integer()) fail(path, where + " must be an integer");
    return j.get<int>();
}

std::string as_string(const json& j, const std::string& path, const std::string& where) {
    if (!j.is_string()) fail(path, where + " must be a string");
    return j.get<std::string>();
}

json parse_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(path, "cannot open file");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        fail(path, e.what());
    }
}

void check_version(const json& j, const std::string& path) {
    if (!j.is_object()) fail(path, "document must be a JSON object");
    const json& version = require(j, "format_version", path, "document");
    if (!version.is_number_integer() || version.get<int>() != 1)
        fail(path, "'format_version' must be the integer 1");
}

json distances_to_json(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string xml_escape(const std::string& text) {
    std::string out;
    out.reserve(text.size());
    for (char c : text) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            case '\'': out += "&apos;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string svg_coord(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.3f", v);
    return buf;
}

constexpr const char* kPalette[] = {"#4c78a8", "#f58518", "#54a24b", "#e45756", "#72b7b2",
                                    "#eeca3b", "#b279a2", "#ff9da6", "#9d755d", "#bab0ac"};

}  // namespace

GraphDocument make_graph_document(const GraphInstance& graph) {
    GraphDocument doc;
    doc.graph = graph;
    doc.ids.reserve(graph.node_count);
    for (int i = 0; i < graph.node_count; ++i) doc.ids.push_back("n" + std::to_string(i));
    return doc;
}

GraphDocument make_graph_document(const BenchmarkInstance& instance) {
    GraphDocument doc = make_graph_document(instance.graph);
    doc.coords = instance.points;
    return doc;
}

GraphDocument load_graph(const std::string& path) {
    const json j = parse_file(path);
    check_version(j, path);

    const json& nodes = require(j, "nodes", path, "document");
    if (!nodes.is_array()) fail(path, "'nodes' must be an array");
    const int n = static_cast<int>(nodes.size());

    GraphDocument doc;
    std::vector<std::string> groups(n);
    bool any_group = false;
    std::map<std::string, int> index_of;
    std::vector<std::vector<double>> coords(n);
    int coord_count = 0;
    for (int i = 0; i < n; ++i) {
        const std::string where = "nodes[" + std::to_string(i) + "]";
        const json& node = nodes[i];
        if (!node.is_object()) fail(path, where + " must be an object");
        const std::string id = as_string(require(node, "id", path, where), path, where + ".id");
        if (!index_of.emplace(id, i).second) fail(path, "duplicate node id '" + id + "'");
        doc.ids.push_back(id);
        if (const auto git = node.find("group"); git != node.end()) {
            groups[i] = as_string(*git, path, where + ".group");
            any_group = true;
        }
        if (const auto cit = node.find("coords"); cit != node.end()) {
            if (!cit->is_array() || cit->size() < 2)
                fail(path, where + ".coords must be an array of at least 2 numbers");
            for (const auto& c : *cit)
                coords[i].push_back(as_number(c, path, where + ".coords"));
            ++coord_count;
        }
    }

    const json& distances = require(j, "distances", path, "document");
    Eigen::MatrixXd d;
    if (distances.is_string() && distances.get<std::string>() == "euclidean") {
        if (coord_count != n)
            fail(path, "'distances' is \"euclidean\" but not every node has 'coords'");
        const std::size_t dim = n > 0 ? coords[0].size() : 0;
        Eigen::MatrixXd pts(n, static_cast<Eigen::Index>(dim));
        for (int i = 0; i < n; ++i) {
            if (coords[i].size() != dim)
                fail(path, "nodes[" + std::to_string(i) + "].coords has " +
                               std::to_string(coords[i].size()) + " entries, expected " +
                               std::to_string(dim));
            for (std::size_t k = 0; k < dim; ++k) pts(i, static_cast<Eigen::Index>(k)) = coords[i][k];
        }
        d = Eigen::MatrixXd::Zero(n, n);
        for (int i = 0; i < n; ++i) {
            for (int k = i + 1; k < n; ++k) {
                const double dist = (pts.row(i) - pts.row(k)).norm();
                d(i, k) = dist;
                d(k, i) = dist;
            }
        }
        doc.coords = std::move(pts);
    } else if (distances.is_object()) {
        const json& matrix = require(distances, "matrix", path, "'distances'");
        if (!matrix.is_array() || static_cast<int>(matrix.size()) != n)
            fail(path, "'distances.matrix' must be an array of " + std::to_string(n) + " rows");
        d.resize(n, n);
        for (int i = 0; i < n; ++i) {
            const json& row = matrix[i];
            if (!row.is_array() || static_cast<int>(row.size()) != n)
                fail(path, "distances.matrix[" + std::to_string(i) + "] must have " +
                               std::to_string(n) + " entries");
            for (int k = 0; k < n; ++k)
                d(i, k) = as_number(row[k], path,
                                    "distances.matrix[" + std::to_string(i) + "][" +
                                        std::to_string(k) + "]");
        }
    } else {
        fail(path, "'distances' must be the string \"euclidean\" or an object with 'matrix'");
    }

    const json& edges = require(j, "edges", path, "document");
    if (!edges.is_array()) fail(path, "'edges' must be an array");
    std::vector<Edge> edge_list;
    edge_list.reserve(edges.size());
    for (std::size_t i = 0; i < edges.size(); ++i) {
        const std::string where = "edges[" + std::to_string(i) + "]";
        const json& edge = edges[i];
        if (!edge.is_object()) fail(path, where + " must be an object");
        const std::string source =
            as_string(require(edge, "source", path, where), path, where + ".source");
        const std::string target =
            as_string(require(edge, "target", path, where), path, where + ".target");
        const auto sit = index_of.find(source);
        if (sit == index_of.end()) fail(path, where + ".source references unknown id '" + source + "'");
        const auto tit = index_of.find(target);
        if (tit == index_of.end()) fail(path, where + ".target references unknown id '" + target + "'");
        edge_list.push_back({sit->second, tit->second});
    }

    try {
        doc.graph = GraphInstance(n, std::move(edge_list), std::move(d),
                                  any_group ? std::move(groups) : std::vector<std::string>{});
    } catch (const std::invalid_argument& e) {
        fail(path, e.what());
    }
    return doc;
}

void save_graph(const GraphDocument& doc, const std::string& path) {
    const GraphInstance& g = doc.graph;
    if (static_cast<int>(doc.ids.size()) != g.node_count)
        throw IoError(path + ": document needs one id per node");
    json j;
    j["format_version"] = 1;
    json nodes = json::array();
    for (int i = 0; i < g.node_count; ++i) {
        json node;
        node["id"] = doc.ids[i];
        if (!g.groups.empty() && !g.groups[i].empty()) node["group"] = g.groups[i];
        if (doc.coords) {
            json c = json::array();
            for (Eigen::Index k = 0; k < doc.coords->cols(); ++k) c.push_back((*doc.coords)(i, k));
            node["coords"] = std::move(c);
        }
        nodes.push_back(std::move(node));
    }
    j["nodes"] = std::move(nodes);
    json edges = json::array();
    for (const Edge& e : g.edges) {
        json edge;
        edge["source"] = doc.ids[e.a];
        edge["target"] = doc.ids[e.b];
        edges.push_back(std::move(edge));
    }
    j["edges"] = std::move(edges);
    if (doc.coords) {
        j["distances"] = "euclidean";
    } else {
        j["distances"] = json{{"matrix", distances_to_json(g.distances)}};
    }
    write_text_atomic(path, j.dump(2) + "\n");
}

LayoutDocument load_layout(const std::string& path) {
    const json j = parse_file(path);
    check_version(j, path);

    const json& nodes = require(j, "nodes", path, "document");
    if (!nodes.is_array()) fail(path, "'nodes' must be an array");
    LayoutDocument doc;
    const int n = static_cast<int>(nodes.size());
    doc.coordinates.resize(n, 2);
    std::set<std::string> seen;
    for (int i = 0; i < n; ++i) {
        const std::string where = "nodes[" + std::to_string(i) + "]";
        const json& node = nodes[i];
        if (!node.is_object()) fail(path, where + " must be an object");
        const std::string id = as_string(require(node, "id", path, where), path, where + ".id");
        if (!seen.insert(id).second) fail(path, "duplicate node id '" + id + "'");
        doc.ids.push_back(id);
        doc.coordinates(i, 0) = as_number(require(node, "x", path, where), path, where + ".x");
        doc.coordinates(i, 1) = as_number(require(node, "y", path, where), path, where + ".y");
    }

    const json& metrics = require(j, "metrics", path, "document");
    if (!metrics.is_object()) fail(path, "'metrics' must be an object");
    doc.metrics.stress = as_number(require(metrics, "stress", path, "'metrics'"), path, "metrics.stress");
    doc.metrics.crossings =
        as_integer(require(metrics, "crossings", path, "'metrics'"), path, "metrics.crossings");
    doc.metrics.runtime_seconds = as_number(require(metrics, "runtime_seconds", path, "'metrics'"),
                                            path, "metrics.runtime_seconds");

    if (const auto tit = j.find("trace"); tit != j.end()) {
        if (!tit->is_array()) fail(path, "'trace' must be an array");
        for (std::size_t i = 0; i < tit->size(); ++i) {
            const std::string where = "trace[" + std::to_string(i) + "]";
            const json& rec = (*tit)[i];
            if (!rec.is_object()) fail(path, where + " must be an object");
            TraceRecord r;
            r.iteration = as_integer(require(rec, "iteration", path, where), path, where + ".iteration");
            r.stress = as_number(require(rec, "stress", path, where), path, where + ".stress");
            if (const auto it = rec.find("crossings"); it != rec.end())
                r.crossings = as_integer(*it, path, where + ".crossings");
            if (const auto it = rec.find("penalty_count"); it != rec.end())
                r.penalty_count = as_integer(*it, path, where + ".penalty_count");
            if (const auto it = rec.find("max_rho"); it != rec.end())
                r.max_rho = as_number(*it, path, where + ".max_rho");
            doc.trace.push_back(r);
        }
    }
    return doc;
}

void save_layout(const LayoutDocument& doc, const std::string& path) {
    if (static_cast<int>(doc.ids.size()) != doc.coordinates.rows())
        throw IoError(path + ": document needs one id per layout row");
    json j;
    j["format_version"] = 1;
    json nodes = json::array();
    for (Eigen::Index i = 0; i < doc.coordinates.rows(); ++i) {
        json node;
        node["id"] = doc.ids[static_cast<std::size_t>(i)];
        node["x"] = doc.coordinates(i, 0);
        node["y"] = doc.coordinates(i, 1);
        nodes.push_back(std::move(node));
    }
    j["nodes"] = std::move(nodes);
    j["metrics"] = {{"stress", doc.metrics.stress},
                    {"crossings", doc.metrics.crossings},
                    {"runtime_seconds", doc.metrics.runtime_seconds}};
    if (!doc.trace.empty()) {
        json trace = json::array();
        for (const TraceRecord& r : doc.trace) {
            json rec;
            rec["iteration"] = r.iteration;
            rec["stress"] = r.stress;
            if (r.crossings) rec["crossings"] = *r.crossings;
            if (r.penalty_count) rec["penalty_count"] = *r.penalty_count;
            if (r.max_rho) rec["max_rho"] = *r.max_rho;
            trace.push_back(std::move(rec));
        }
        j["trace"] = std::move(trace);
    }
    write_text_atomic(path, j.dump(2) + "\n");
}

Layout align_layout(const GraphDocument& graph, const LayoutDocument& layout) {
    if (layout.ids.size() != graph.ids.size())
        throw IoError("layout has " + std::to_string(layout.ids.size()) + " nodes, graph has " +
                      std::to_string(graph.ids.size()));
    std::map<std::string, Eigen::Index> row_of;
    for (std::size_t i = 0; i < layout.ids.size(); ++i)
        row_of[layout.ids[i]] = static_cast<Eigen::Index>(i);
    Layout aligned(graph.ids.size(), 2);
    for (std::size_t i = 0; i < graph.ids.size(); ++i) {
        const auto it = row_of.find(graph.ids[i]);
        if (it == row_of.end())
            throw IoError("layout is missing node id '" + graph.ids[i] + "'");
        aligned.row(static_cast<Eigen::Index>(i)) = layout.coordinates.row(it->second);
    }
    return aligned;
}

std::string render_svg(const Layout& layout, const GraphInstance& graph,
                       const std::vector<std::string>& ids, const SvgOptions& options) {
    const double margin_x = 0.05 * options.width;
    const double margin_y = 0.05 * options.height;
    const double avail_w = options.width - 2.0 * margin_x;
    const double avail_h = options.height - 2.0 * margin_y;

    const int n = static_cast<int>(layout.rows());
    Eigen::RowVector2d lo = Eigen::RowVector2d::Zero(), extent = Eigen::RowVector2d::Zero();
    if (n > 0) {
        lo = layout.colwise().minCoeff();
        extent = layout.colwise().maxCoeff() - lo;
    }
    double scale = 1.0;
    if (extent.x() > 0.0 || extent.y() > 0.0) {
        scale = std::numeric_limits<double>::infinity();
        if (extent.x() > 0.0) scale = std::min(scale, avail_w / extent.x());
        if (extent.y() > 0.0) scale = std::min(scale, avail_h / extent.y());
    }
    const double offset_x = margin_x + 0.5 * (avail_w - scale * extent.x());
    const double offset_y = margin_y + 0.5 * (avail_h - scale * extent.y());
    const auto to_px_x = [&](double x) { return offset_x + scale * (x - lo.x()); };
    const auto to_px_y = [&](double y) { return options.height - (offset_y + scale * (y - lo.y())); };

    std::map<std::string, std::size_t> group_color;
    for (const std::string& g : graph.groups)
        if (!g.empty()) group_color.emplace(g, group_color.size());
    constexpr std::size_t palette_size = std::size(kPalette);

    std::string svg;
    svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + svg_coord(options.width) +
           "\" height=\"" + svg_coord(options.height) + "\" viewBox=\"0 0 " +
           svg_coord(options.width) + " " + svg_coord(options.height) + "\">\n";
    svg += "  <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    for (const Edge& e : graph.edges) {
        svg += "  <line x1=\"" + svg_coord(to_px_x(layout(e.a, 0))) + "\" y1=\"" +
               svg_coord(to_px_y(layout(e.a, 1))) + "\" x2=\"" +
               svg_coord(to_px_x(layout(e.b, 0))) + "\" y2=\"" +
               svg_coord(to_px_y(layout(e.b, 1))) + "\" stroke=\"#666666\" stroke-width=\"" +
               svg_coord(options.edge_width) + "\" stroke-linecap=\"round\"/>\n";
    }
    for (int i = 0; i < n; ++i) {
        const char* color = kPalette[0];
        if (!graph.groups.empty() && !graph.groups[i].empty())
            color = kPalette[group_color.at(graph.groups[i]) % palette_size];
        svg += "  <circle cx=\"" + svg_coord(to_px_x(layout(i, 0))) + "\" cy=\"" +
               svg_coord(to_px_y(layout(i, 1))) + "\" r=\"" + svg_coord(options.node_radius) +
               "\" fill=\"" + color + "\"/>\n";
        if (options.labels && i < static_cast<int>(ids.size())) {
            svg += "  <text x=\"" + svg_coord(to_px_x(layout(i, 0)) + options.node_radius + 2.0) +
                   "\" y=\"" + svg_coord(to_px_y(layout(i, 1)) - options.node_radius) +
                   "\" font-size=\"10\" font-family=\"sans-serif\">" +
                   xml_escape(ids[static_cast<std::size_t>(i)]) + "</text>\n";
        }
    }
    svg += "</svg>\n";
    return svg;
}

void write_text_atomic(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError(tmp.string() + ": cannot open for writing");
        out << content;
        out.flush();
        if (!out) throw IoError(tmp.string() + ": write failed");
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp);
        throw IoError(path + ": rename failed: " + ec.message());
    }
}

std::string format_number(double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", value);
    return buf;
}

}  // namespace uncross
