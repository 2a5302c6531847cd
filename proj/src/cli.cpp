#include "uncross/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <filesystem>
#include <iostream>
#include <map>
#include <thread>
#include <tuple>

#include "uncross/crsm.hpp"
#include "uncross/datagen.hpp"
#include "uncross/geometry.hpp"
#include "uncross/io.hpp"
#include "uncross/mds.hpp"

namespace uncross {

namespace {

using ordered_json = nlohmann::ordered_json;

const char* reason_name(StopReason reason) {
    switch (reason) {
        case StopReason::no_crossings: return "no-crossings";
        case StopReason::movement_below_tolerance: return "movement-below-tolerance";
        case StopReason::iteration_cap: return "iteration-cap";
    }
    return "unknown";
}

struct GenOptions {
    int nodes = 0;
    int edges = 0;
    int dim = 7;
    std::uint64_t seed = 0;
    std::string out;
};

struct EmbedOptions {
    std::string graph_path;
    std::string out;
    std::string method = "crsm";
    std::uint64_t seed = 0;
    double alpha = 2.0;
    int max_iterations = 500;  // stress majorization iterations (mds method)
    PenaltyParams params;
    double rho_min = -1.0;  // negative: keep the stress-derived default
    std::string svg_path;
    std::string trace_path;
};

struct MetricsOptions {
    std::string graph_path;
    std::string layout_path;
    double alpha = 2.0;
};

struct BenchOptions {
    std::string spec_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    bool seed_given = false;
    double alpha = 2.0;
    int jobs = 1;
};

int run_gen(const GenOptions& opt) {
    const BenchmarkInstance instance =
        generate_planar_instance(opt.nodes, opt.edges, opt.dim, opt.seed);
    save_graph(make_graph_document(instance), opt.out);
    std::cout << "generated " << opt.nodes << " nodes " << opt.edges << " edges -> " << opt.out
              << " (planar stress " << format_number(instance.planar_stress) << ")\n";
    return 0;
}

std::vector<TraceRecord> crsm_trace_records(const RunReport& report) {
    std::vector<TraceRecord> records;
    records.reserve(report.trace.size());
    for (std::size_t i = 0; i < report.trace.size(); ++i) {
        TraceRecord r;
        r.iteration = static_cast<int>(i);
        r.stress = report.trace[i].stress;
        r.crossings = report.trace[i].crossings;
        r.penalty_count = report.trace[i].penalty_count;
        r.max_rho = report.trace[i].max_rho;
        records.push_back(r);
    }
    return records;
}

void save_trace_animation(const GraphDocument& doc, const RunReport& report,
                          const std::string& path) {
    ordered_json j;
    j["format_version"] = 1;
    ordered_json frames = ordered_json::array();
    for (std::size_t i = 0; i < report.layouts.size(); ++i) {
        ordered_json frame;
        frame["iteration"] = static_cast<int>(i);
        frame["stress"] = report.trace[i].stress;
        frame["crossings"] = report.trace[i].crossings;
        ordered_json nodes = ordered_json::array();
        const Layout& layout = report.layouts[i];
        for (Eigen::Index row = 0; row < layout.rows(); ++row) {
            ordered_json node;
            node["id"] = doc.ids[static_cast<std::size_t>(row)];
            node["x"] = layout(row, 0);
            node["y"] = layout(row, 1);
            nodes.push_back(std::move(node));
        }
        frame["nodes"] = std::move(nodes);
        frames.push_back(std::move(frame));
    }
    j["frames"] = std::move(frames);
    write_text_atomic(path, j.dump(2) + "\n");
}

int run_embed(const EmbedOptions& opt) {
    const GraphDocument doc = load_graph(opt.graph_path);
    const GraphInstance& graph = doc.graph;
    const WeightMatrix weights = build_weights(graph, opt.alpha);

    LayoutDocument out;
    out.ids = doc.ids;
    std::string status;
    RunReport report;
    if (opt.method == "mds") {
        const auto t0 = std::chrono::steady_clock::now();
        const SmacofResult res =
            smacof_embed(graph, weights, nullptr, opt.max_iterations, 1e-6, opt.seed);
        out.coordinates = res.layout;
        out.metrics.runtime_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        for (std::size_t i = 0; i < res.stress_trace.size(); ++i)
            out.trace.push_back({static_cast<int>(i), res.stress_trace[i], {}, {}, {}});
        status = res.converged ? "converged" : "iteration-cap";
    } else {
        PenaltyParams params = opt.params;
        if (opt.rho_min >= 0.0) params.rho_min = opt.rho_min;
        report = crsm_run(graph, params, nullptr, opt.seed, opt.alpha);
        out.coordinates = report.layout;
        out.metrics.runtime_seconds = report.runtime_seconds;
        out.trace = crsm_trace_records(report);
        status = reason_name(report.reason);
        if (report.optimizer_warning)
            std::cerr << "warning: an inner optimization stalled; returned the best layout seen\n";
    }
    out.metrics.stress = stress(out.coordinates, graph, weights);
    out.metrics.crossings = count_crossings(out.coordinates, graph);
    save_layout(out, opt.out);
    if (!opt.svg_path.empty())
        write_text_atomic(opt.svg_path, render_svg(out.coordinates, graph, doc.ids));
    if (!opt.trace_path.empty()) save_trace_animation(doc, report, opt.trace_path);
    std::cout << "stress " << format_number(out.metrics.stress) << " crossings "
              << out.metrics.crossings << " (" << status << ", "
              << format_number(out.metrics.runtime_seconds) << " s) -> " << opt.out << "\n";
    return 0;
}

int run_metrics(const MetricsOptions& opt) {
    const GraphDocument doc = load_graph(opt.graph_path);
    const LayoutDocument layout = load_layout(opt.layout_path);
    const Layout aligned = align_layout(doc, layout);
    const WeightMatrix weights = build_weights(doc.graph, opt.alpha);
    std::cout << "stress " << format_number(stress(aligned, doc.graph, weights)) << "\n"
              << "crossings " << count_crossings(aligned, doc.graph) << "\n";
    return 0;
}

struct BenchRecord {
    SuiteRow row;
    int replicate = 0;
    std::uint64_t seed = 0;
    bool ok = false;
    std::string error;
    double planar_stress = 0.0;
    double mds_stress = 0.0;
    int mds_crossings = 0;
    double mds_runtime = 0.0;
    double crsm_stress = 0.0;
    int crsm_crossings = 0;
    double crsm_runtime = 0.0;
    std::string crsm_reason;
};

std::vector<SuiteRow> parse_bench_spec(const std::string& path, std::uint64_t& seed) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(path + ": cannot open file");
    ordered_json j;
    try {
        j = ordered_json::parse(in);
    } catch (const ordered_json::parse_error& e) {
        throw IoError(path + ": " + e.what());
    }
    if (!j.is_object() || !j.contains("rows") || !j["rows"].is_array())
        throw IoError(path + ": document must be an object with a 'rows' array");
    if (j.contains("seed")) {
        if (!j["seed"].is_number_unsigned() && !j["seed"].is_number_integer())
            throw IoError(path + ": 'seed' must be an integer");
        seed = j["seed"].get<std::uint64_t>();
    }
    std::vector<SuiteRow> rows;
    for (std::size_t i = 0; i < j["rows"].size(); ++i) {
        const auto& rj = j["rows"][i];
        const std::string where = path + ": rows[" + std::to_string(i) + "]";
        if (!rj.is_object() || !rj.contains("nodes") || !rj.contains("edges"))
            throw IoError(where + " must be an object with 'nodes' and 'edges'");
        SuiteRow row;
        row.nodes = rj["nodes"].get<int>();
        row.edges = rj["edges"].get<int>();
        if (rj.contains("dim")) row.dimension = rj["dim"].get<int>();
        if (rj.contains("replicates")) row.replicates = rj["replicates"].get<int>();
        if (row.replicates < 1) throw IoError(where + ": 'replicates' must be at least 1");
        rows.push_back(row);
    }
    return rows;
}

BenchRecord run_bench_instance(const SuiteItem& item, const std::filesystem::path& dir,
                               std::size_t index, double alpha) {
    BenchRecord rec;
    rec.row = item.row;
    rec.replicate = item.replicate;
    rec.seed = item.seed;
    if (!item.instance) {
        rec.error = item.error;
        return rec;
    }
    const BenchmarkInstance& instance = *item.instance;
    const GraphInstance& graph = instance.graph;
    char tag[32];
    std::snprintf(tag, sizeof(tag), "instance_%03zu", index);
    const GraphDocument doc = make_graph_document(instance);
    save_graph(doc, (dir / (std::string(tag) + "_graph.json")).string());

    const WeightMatrix weights = build_weights(graph, alpha);
    const auto t0 = std::chrono::steady_clock::now();
    const SmacofResult mds = smacof_embed(graph, weights, nullptr, 500, 1e-6, item.seed);
    rec.mds_runtime = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    rec.mds_stress = stress(mds.layout, graph, weights);
    rec.mds_crossings = count_crossings(mds.layout, graph);

    LayoutDocument mds_doc;
    mds_doc.ids = doc.ids;
    mds_doc.coordinates = mds.layout;
    mds_doc.metrics = {rec.mds_stress, rec.mds_crossings, rec.mds_runtime};
    save_layout(mds_doc, (dir / (std::string(tag) + "_mds.json")).string());

    const RunReport report = crsm_run(graph, {}, &mds.layout, item.seed, alpha);
    rec.crsm_stress = report.final_stress;
    rec.crsm_crossings = report.final_crossings;
    rec.crsm_runtime = report.runtime_seconds;
    rec.crsm_reason = reason_name(report.reason);

    LayoutDocument crsm_doc;
    crsm_doc.ids = doc.ids;
    crsm_doc.coordinates = report.layout;
    crsm_doc.metrics = {rec.crsm_stress, rec.crsm_crossings, rec.crsm_runtime};
    crsm_doc.trace = crsm_trace_records(report);
    save_layout(crsm_doc, (dir / (std::string(tag) + "_crsm.json")).string());

    rec.planar_stress = instance.planar_stress;
    rec.ok = true;
    return rec;
}

int run_bench(const BenchOptions& opt) {
    std::uint64_t seed = 0;
    std::vector<SuiteRow> rows = parse_bench_spec(opt.spec_path, seed);
    if (opt.seed_given) seed = opt.seed;
    const std::vector<SuiteItem> items = generate_suite(rows, seed);

    namespace fs = std::filesystem;
    const fs::path dir(opt.out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError(opt.out_dir + ": cannot create directory: " + ec.message());

    std::vector<BenchRecord> records(items.size());
    const std::size_t workers =
        std::min<std::size_t>(std::max(opt.jobs, 1), std::max<std::size_t>(items.size(), 1));
    auto work = [&](std::size_t start) {
        for (std::size_t i = start; i < items.size(); i += workers)
            records[i] = run_bench_instance(items[i], dir, i, opt.alpha);
    };
    if (workers <= 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < workers; ++t) pool.emplace_back(work, t);
        for (auto& th : pool) th.join();
    }

    // per-instance table
    std::string csv =
        "index,nodes,edges,dim,replicate,seed,status,planar_stress,mds_stress,mds_crossings,"
        "crsm_stress,crsm_crossings,crsm_reason,crsm_runtime_seconds\n";
    for (std::size_t i = 0; i < records.size(); ++i) {
        const BenchRecord& r = records[i];
        csv += std::to_string(i) + "," + std::to_string(r.row.nodes) + "," +
               std::to_string(r.row.edges) + "," + std::to_string(r.row.dimension) + "," +
               std::to_string(r.replicate) + "," + std::to_string(r.seed) + ",";
        if (!r.ok) {
            csv += "failed,,,,,,,\n";
            continue;
        }
        csv += "ok," + format_number(r.planar_stress) + "," + format_number(r.mds_stress) + "," +
               std::to_string(r.mds_crossings) + "," + format_number(r.crsm_stress) + "," +
               std::to_string(r.crsm_crossings) + "," + r.crsm_reason + "," +
               format_number(r.crsm_runtime) + "\n";
    }
    write_text_atomic((dir / "instances.csv").string(), csv);

    // aggregate per suite row
    std::map<std::tuple<int, int, int>, std::vector<const BenchRecord*>> by_row;
    for (const auto& r : records)
        by_row[{r.row.nodes, r.row.edges, r.row.dimension}].push_back(&r);

    ordered_json summary;
    summary["format_version"] = 1;
    summary["seed"] = seed;
    ordered_json agg_rows = ordered_json::array();
    std::cout << "nodes edges dim   ok    stress:mds   crsm  planar     cross:mds    crsm   "
                 "uncrossed\n";
    int failures = 0;
    for (const auto& [key, group] : by_row) {
        const auto [nodes, edges, dim] = key;
        double mds_s = 0, crsm_s = 0, planar_s = 0, mds_c = 0, crsm_c = 0;
        int ok = 0, zero = 0;
        for (const BenchRecord* r : group) {
            if (!r->ok) {
                ++failures;
                continue;
            }
            ++ok;
            mds_s += r->mds_stress;
            crsm_s += r->crsm_stress;
            planar_s += r->planar_stress;
            mds_c += r->mds_crossings;
            crsm_c += r->crsm_crossings;
            if (r->crsm_crossings == 0) ++zero;
        }
        if (ok > 0) {
            mds_s /= ok;
            crsm_s /= ok;
            planar_s /= ok;
            mds_c /= ok;
            crsm_c /= ok;
        }
        const double crsm_ratio = mds_s > 0 ? crsm_s / mds_s : 0.0;
        const double planar_ratio = mds_s > 0 ? planar_s / mds_s : 0.0;
        char line[160];
        std::snprintf(line, sizeof(line),
                      "%5d %5d %3d %4d         1.000 %6.3f %7.3f      %8.1f %7.1f     %d/%zu\n",
                      nodes, edges, dim, ok, crsm_ratio, planar_ratio, mds_c, crsm_c, zero,
                      group.size());
        std::cout << line;
        ordered_json row;
        row["nodes"] = nodes;
        row["edges"] = edges;
        row["dim"] = dim;
        row["instances"] = group.size();
        row["generated"] = ok;
        row["mean_mds_stress"] = mds_s;
        row["mean_crsm_stress"] = crsm_s;
        row["mean_planar_stress"] = planar_s;
        row["crsm_stress_ratio"] = crsm_ratio;
        row["planar_stress_ratio"] = planar_ratio;
        row["mean_mds_crossings"] = mds_c;
        row["mean_crsm_crossings"] = crsm_c;
        row["zero_crossing_count"] = zero;
        agg_rows.push_back(std::move(row));
    }
    summary["rows"] = std::move(agg_rows);
    write_text_atomic((dir / "summary.json").string(), summary.dump(2) + "\n");
    for (const auto& r : records)
        if (!r.ok)
            std::cerr << "warning: generation failed for nodes=" << r.row.nodes
                      << " edges=" << r.row.edges << " seed=" << r.seed << ": " << r.error << "\n";
    std::cout << "wrote " << records.size() << " instances to " << opt.out_dir << " (" << failures
              << " failed)\n";
    return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"low-stress graph layouts with edge crossing reduction"};
    app.require_subcommand(1);

    GenOptions gen;
    CLI::App* gen_cmd = app.add_subcommand("gen", "generate a random planar benchmark graph");
    gen_cmd->add_option("--nodes,-n", gen.nodes, "number of nodes")->required();
    gen_cmd->add_option("--edges,-e", gen.edges, "number of edges")->required();
    gen_cmd->add_option("--dim,-d", gen.dim, "dimension of the sampled points");
    gen_cmd->add_option("--seed,-s", gen.seed, "random seed");
    gen_cmd->add_option("--out,-o", gen.out, "output graph document")->required();

    EmbedOptions embed;
    CLI::App* embed_cmd = app.add_subcommand("embed", "embed a graph document into the plane");
    embed_cmd->add_option("graph", embed.graph_path, "input graph document")->required();
    embed_cmd->add_option("--out,-o", embed.out, "output layout document")->required();
    embed_cmd->add_option("--method,-m", embed.method, "embedding method")
        ->check(CLI::IsMember({"mds", "crsm"}));
    embed_cmd->add_option("--seed,-s", embed.seed, "random seed for the initial layout");
    embed_cmd->add_option("--alpha", embed.alpha, "stress weight exponent alpha");
    embed_cmd->add_option("--max-iterations", embed.max_iterations,
                          "stress majorization iteration cap (mds method)");
    embed_cmd->add_option("--max-outer", embed.params.max_outer, "outer iteration cap");
    embed_cmd->add_option("--max-inner", embed.params.max_inner, "inner iteration cap");
    embed_cmd->add_option("--epsilon", embed.params.epsilon, "inner movement threshold");
    embed_cmd->add_option("--tau", embed.params.tau, "detection and convergence threshold");
    embed_cmd->add_option("--rho-min", embed.rho_min, "initial penalty weight");
    embed_cmd->add_option("--rho-increase", embed.params.rho_increase, "penalty escalation factor");
    embed_cmd->add_option("--rho-max", embed.params.rho_max, "penalty weight cap");
    embed_cmd->add_option("--svg", embed.svg_path, "also render the layout to this SVG file");
    embed_cmd->add_option("--trace", embed.trace_path,
                          "write per-iteration layouts to this JSON file (crsm only)");

    MetricsOptions metrics;
    CLI::App* metrics_cmd =
        app.add_subcommand("metrics", "recompute stress and crossings for a stored layout");
    metrics_cmd->add_option("graph", metrics.graph_path, "graph document")->required();
    metrics_cmd->add_option("layout", metrics.layout_path, "layout document")->required();
    metrics_cmd->add_option("--alpha", metrics.alpha, "stress weight exponent alpha");

    BenchOptions bench;
    CLI::App* bench_cmd =
        app.add_subcommand("bench", "run the generation and embedding benchmark suite");
    bench_cmd->add_option("spec", bench.spec_path, "suite specification document")->required();
    bench_cmd->add_option("--out,-o", bench.out_dir, "output directory")->required();
    const auto* bench_seed_opt =
        bench_cmd->add_option("--seed,-s", bench.seed, "master seed (overrides the spec)");
    bench_cmd->add_option("--alpha", bench.alpha, "stress weight exponent alpha");
    bench_cmd->add_option("--jobs,-j", bench.jobs, "number of worker threads");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    if (embed_cmd->parsed() && !embed.trace_path.empty() && embed.method != "crsm") {
        std::cerr << "--trace requires --method crsm\n";
        return 2;
    }
    bench.seed_given = bench_seed_opt->count() > 0;

    try {
        if (gen_cmd->parsed()) return run_gen(gen);
        if (embed_cmd->parsed()) return run_embed(embed);
        if (metrics_cmd->parsed()) return run_metrics(metrics);
        if (bench_cmd->parsed()) return run_bench(bench);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

}  // namespace uncross
