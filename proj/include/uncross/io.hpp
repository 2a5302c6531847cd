#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "uncross/datagen.hpp"
#include "uncross/types.hpp"

namespace uncross {

class IoError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A graph instance plus its serialization context: stable node ids and,
// when the metric came from sampled points, the coordinates it derives from.
// Documents with coordinates store the metric as "euclidean" and rebuild it
// on load; otherwise the full distance matrix is written.
struct GraphDocument {
    GraphInstance graph;
    std::vector<std::string> ids;
    std::optional<Eigen::MatrixXd> coords;
};

GraphDocument make_graph_document(const GraphInstance& graph);
GraphDocument make_graph_document(const BenchmarkInstance& instance);

GraphDocument load_graph(const std::string& path);
void save_graph(const GraphDocument& doc, const std::string& path);

struct LayoutMetrics {
    double stress = 0.0;
    int crossings = 0;
    double runtime_seconds = 0.0;
};

struct TraceRecord {
    int iteration = 0;
    double stress = 0.0;
    std::optional<int> crossings;
    std::optional<int> penalty_count;
    std::optional<double> max_rho;
};

struct LayoutDocument {
    std::vector<std::string> ids;
    Layout coordinates;
    LayoutMetrics metrics;
    std::vector<TraceRecord> trace;  // omitted from the file when empty
};

LayoutDocument load_layout(const std::string& path);
void save_layout(const LayoutDocument& doc, const std::string& path);

// Reorders the layout rows to match the graph document's node order;
// throws IoError when the id sets differ.
Layout align_layout(const GraphDocument& graph, const LayoutDocument& layout);

struct SvgOptions {
    double width = 1000.0;
    double height = 1000.0;
    double node_radius = 4.0;
    double edge_width = 1.5;
    bool labels = false;
};

// Standalone SVG drawing of the layout: edges under nodes, nodes colored by
// group, coordinates scaled uniformly into the viewport with a 5% margin.
std::string render_svg(const Layout& layout, const GraphInstance& graph,
                       const std::vector<std::string>& ids, const SvgOptions& options = {});

// Writes through a temporary file in the same directory plus an atomic
// rename, so readers never observe a partial file.
void write_text_atomic(const std::string& path, const std::string& content);

std::string format_number(double value);  // shortest form with 12 significant digits

}  // namespace uncross
