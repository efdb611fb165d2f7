// seqpat: passage delimiting, pattern mining and sparse pattern classifiers
// for event-sequence data.

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "seqpat/seqpat.hpp"

namespace {

using namespace seqpat;
using Json = nlohmann::ordered_json;

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "'");
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path + "'");
    out << text;
    if (!out) throw IoError("write failed for '" + path + "'");
}

/// Output goes to `path`, or stdout when empty or "-".
void emit(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") std::cout << text;
    else write_file(path, text);
}

/// Loads an alphabet: "rugby" for the built-in table, "none" for ids only,
/// otherwise an id,name,side CSV file.
EventAlphabet alphabet_from(const std::string& spec) {
    if (spec == "rugby") return EventAlphabet::rugby();
    if (spec == "none" || spec.empty()) return {};
    std::istringstream in(read_file(spec));
    return parse_alphabet(in);
}

LabeledDataset dataset_from(const std::string& path) {
    std::istringstream in(read_file(path));
    return parse_dataset(in);
}

class Manifest {
public:
    explicit Manifest(std::string subcommand) : start_(std::chrono::steady_clock::now()) {
        doc_["subcommand"] = std::move(subcommand);
        doc_["version"] = SEQPAT_VERSION;
        doc_["config"] = Json::object();
        doc_["inputs"] = Json::object();
        doc_["outputs"] = Json::array();
    }

    Json& config() { return doc_["config"]; }
    void seed(std::uint64_t s) { doc_["seed"] = s; }
    void input(const std::string& role, const std::string& path) {
        doc_["inputs"][role] = {{"path", path}, {"fnv1a64", hex64(fnv1a64(read_file(path)))}};
    }
    void output(const std::string& path) {
        if (!path.empty() && path != "-") doc_["outputs"].push_back(path);
    }

    /// Written next to the first file output, if any.
    void save() {
        if (doc_["outputs"].empty()) return;
        doc_["elapsed_seconds"] =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
        write_file(doc_["outputs"][0].get<std::string>() + ".manifest.json", doc_.dump(2) + "\n");
    }

private:
    Json doc_;
    std::chrono::steady_clock::time_point start_;
};

// ---------------------------------------------------------------------------

struct DelimitArgs {
    std::string events, out, alphabet = "rugby";
    bool no_suppression = false;
};

int run_delimit(const DelimitArgs& a) {
    Manifest m("delimit");
    m.input("events", a.events);
    DelimitConfig cfg;
    cfg.scrum_reset_suppression = !a.no_suppression;
    cfg.alphabet = alphabet_from(a.alphabet);
    m.config() = {{"scrum_reset_suppression", cfg.scrum_reset_suppression},
                  {"start_events", cfg.start_events},
                  {"post_boundary_events", cfg.post_boundary_events},
                  {"alphabet", a.alphabet}};
    std::istringstream in(read_file(a.events));
    const auto streams = parse_event_stream(in);
    LabeledDataset passages;
    passages.sequences = delimit_matches(streams, cfg);
    std::ostringstream out;
    write_dataset(out, passages);
    emit(a.out, out.str());
    std::cerr << streams.size() << " matches, " << passages.size() << " passages\n";
    m.output(a.out);
    m.save();
    return 0;
}

struct BuildArgs {
    std::string passages, out, perspective = "scoring";
};

int run_build(const BuildArgs& a) {
    Manifest m("build");
    m.input("passages", a.passages);
    m.config() = {{"perspective", a.perspective}};
    const auto p = a.perspective == "scoring" ? Perspective::scoring : Perspective::conceding;
    std::istringstream in(read_file(a.passages));
    const auto passages = parse_dataset(in, LabelMode::unlabeled);
    const auto built = build_outcome_dataset(passages.sequences, p);
    if (built.dropped_empty)
        std::cerr << "warning: dropped " << built.dropped_empty << " passages left empty after removing outcome events\n";
    std::ostringstream out;
    write_dataset(out, built.dataset);
    emit(a.out, out.str());
    std::cerr << built.dataset.size() << " sequences, n+ = " << built.dataset.n_positive()
              << ", n- = " << built.dataset.n_negative() << '\n';
    m.output(a.out);
    m.save();
    return 0;
}

struct StatsArgs {
    std::string dataset, out, histogram;
};

int run_stats(const StatsArgs& a) {
    Manifest m("stats");
    m.input("dataset", a.dataset);
    const auto d = dataset_from(a.dataset);
    const auto s = compute_stats(d);
    std::ostringstream out;
    out << "statistic,value\n";
    out << "n," << s.n << '\n';
    if (d.is_labeled()) out << "n_positive," << s.n_positive << "\nn_negative," << s.n_negative << '\n';
    const std::pair<const char*, double> rows[] = {{"mean", s.mean},     {"std", s.std}, {"min", s.min},
                                                   {"p25", s.p25},       {"median", s.median},
                                                   {"p75", s.p75},       {"max", s.max}, {"skewness", s.skewness}};
    for (const auto& [name, v] : rows) out << name << ',' << detail::format_double(v) << '\n';
    emit(a.out, out.str());
    m.output(a.out);
    if (!a.histogram.empty()) {
        std::ostringstream h;
        write_length_histogram(h, d);
        write_file(a.histogram, h.str());
        m.output(a.histogram);
    }
    m.save();
    return 0;
}

struct MineArgs {
    std::string dataset, out, alphabet = "none", algo = "prefixspan", subset = "all";
    std::size_t min_support = 5, max_length = 20, top = 0;
    bool no_cmap = false;
};

int run_mine(const MineArgs& a) {
    Manifest m("mine");
    m.input("dataset", a.dataset);
    MiningConfig cfg;
    cfg.algorithm = *parse_algorithm(a.algo);
    cfg.min_support = a.min_support;
    cfg.max_length = a.max_length;
    cfg.use_cmap = !a.no_cmap;
    m.config() = {{"algorithm", a.algo},   {"min_support", a.min_support}, {"max_length", a.max_length},
                  {"top", a.top},          {"subset", a.subset},           {"cmap", cfg.use_cmap},
                  {"alphabet", a.alphabet}};
    auto d = dataset_from(a.dataset);
    const auto alphabet = alphabet_from(a.alphabet);
    if (!alphabet.empty()) check_alphabet(d, alphabet);
    if (a.subset != "all") {
        auto split = split_by_label(d);
        d = a.subset == "positive" ? std::move(split.positive) : std::move(split.negative);
        if (d.empty()) throw std::invalid_argument("the " + a.subset + " subset is empty");
    }
    const auto result = mine(d, cfg);
    const auto rows = a.top ? top_k_by_support(result, a.top) : result.patterns;
    std::ostringstream out;
    write_mining_csv(out, rows, alphabet);
    emit(a.out, out.str());
    std::cerr << result.patterns.size() << " patterns (" << result.candidates << " candidates) in "
              << result.elapsed_seconds << " s\n";
    m.output(a.out);
    m.save();
    return 0;
}

struct TrainArgs {
    std::string dataset, out, cv_out, alphabet = "rugby";
    std::size_t max_length = 20, min_support = 5, folds = 10, repeats = 10, grid = 50, threads = 0;
    double grid_ratio = 0.01, tol = 1e-6;
    std::uint64_t seed = 0;
};

int run_train(const TrainArgs& a) {
    Manifest m("train");
    m.input("dataset", a.dataset);
    m.seed(a.seed);
    SppConfig cfg;
    cfg.max_length = a.max_length;
    cfg.min_support_report = a.min_support;
    cfg.grid_size = a.grid;
    cfg.grid_ratio = a.grid_ratio;
    cfg.tol = a.tol;
    CvConfig cv;
    cv.folds = a.folds;
    cv.repeats = a.repeats;
    cv.seed = a.seed;
    const Json config = {{"max_length", a.max_length}, {"min_support", a.min_support}, {"folds", a.folds},
                         {"repeats", a.repeats},       {"grid", a.grid},               {"grid_ratio", a.grid_ratio},
                         {"tol", a.tol},               {"seed", a.seed},               {"alphabet", a.alphabet}};
    m.config() = config;
    m.config()["threads"] = resolve_threads(a.threads);

    const auto d = dataset_from(a.dataset);
    const auto alphabet = alphabet_from(a.alphabet);
    if (!alphabet.empty()) check_alphabet(d, alphabet);
    const auto fit = fit_cv(d, cfg, cv, resolve_threads(a.threads));
    const auto& best = fit.table.rows[fit.best_index];

    Json extra;
    extra["lambda_max"] = fit.path.lambda_max;
    extra["dataset"] = {{"fnv1a64", hex64(fnv1a64(read_file(a.dataset)))},
                        {"n", d.size()},
                        {"n_positive", d.n_positive()},
                        {"n_negative", d.n_negative()}};
    extra["cv"] = {{"folds", a.folds},      {"repeats", a.repeats},         {"seed", a.seed},
                   {"best_index", fit.best_index}, {"mean_acc", best.mean_acc}, {"std_acc", best.std_acc}};
    extra["config"] = config;
    extra["path"] = {{"converged", std::all_of(fit.path.steps.begin(), fit.path.steps.end(),
                                               [](const PathStep& s) { return s.converged; })},
                     {"duality_gap", fit.path.steps[fit.best_index].duality_gap}};
    emit(a.out, model_to_json(fit.model, alphabet, extra).dump(2) + "\n");
    m.output(a.out);
    if (!a.cv_out.empty()) {
        std::ostringstream cvs;
        write_cv_table(cvs, fit.table);
        write_file(a.cv_out, cvs.str());
        m.output(a.cv_out);
    }
    std::size_t visited = 0, pruned = 0;
    for (const auto& s : fit.path.steps) {
        visited += s.stats.nodes_visited;
        pruned += s.stats.nodes_pruned;
    }
    std::cerr << "lambda = " << fit.best_lambda << " (" << fit.best_index + 1 << "/" << fit.table.rows.size()
              << "), cv accuracy " << best.mean_acc << " +- " << best.std_acc << ", " << fit.model.nnz()
              << " patterns; " << visited << " nodes visited, " << pruned << " subtrees pruned\n";
    m.save();
    return 0;
}

struct ReportArgs {
    std::string model, dataset, out, alphabet = "rugby", format = "csv";
    std::size_t top = 5, min_support = 5;
};

int run_report(const ReportArgs& a) {
    Manifest m("report");
    m.input("model", a.model);
    if (!a.dataset.empty()) m.input("dataset", a.dataset);
    m.config() = {{"top", a.top}, {"min_support", a.min_support}, {"format", a.format}, {"alphabet", a.alphabet}};
    const auto text = read_file(a.model);
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("malformed model '" + a.model + "': " + e.what());
    }
    const auto model = model_from_json(doc);
    const auto alphabet = alphabet_from(a.alphabet);
    if (doc.value("alphabet_hash", "") != alphabet_hash(alphabet))
        std::cerr << "warning: model was trained with a different alphabet\n";
    std::optional<LabeledDataset> data;
    if (!a.dataset.empty()) data = dataset_from(a.dataset);
    const auto rows = rank_positive(model, data ? &*data : nullptr, alphabet, a.min_support, a.top);
    std::ostringstream out;
    if (a.format == "json") out << ranked_to_json(rows).dump(2) << '\n';
    else write_ranked_csv(out, rows);
    emit(a.out, out.str());
    m.output(a.out);
    m.save();
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Frequent and discriminative pattern mining for event sequences", "seqpat"};
    app.require_subcommand(1);
    app.set_version_flag("--version", SEQPAT_VERSION);

    DelimitArgs da;
    auto* delimit = app.add_subcommand("delimit", "Split per-match event streams into passages of play");
    delimit->add_option("--events", da.events, "Event stream CSV (match_id,seq_no,event_id)")->required();
    delimit->add_option("--out", da.out, "Output passages (one per line)");
    delimit->add_option("--alphabet", da.alphabet, "Alphabet CSV, 'rugby' or 'none'")->capture_default_str();
    delimit->add_flag("--no-scrum-reset-suppression", da.no_suppression, "Start a passage at every scrum");

    BuildArgs ba;
    auto* build = app.add_subcommand("build", "Label passages from the scoring or conceding perspective");
    build->add_option("--passages", ba.passages, "Passages file")->required();
    build->add_option("--perspective", ba.perspective, "scoring or conceding")->capture_default_str()
        ->check(CLI::IsMember({"scoring", "conceding"}));
    build->add_option("--out", ba.out, "Output labeled dataset");

    StatsArgs sa;
    auto* stats = app.add_subcommand("stats", "Sequence length statistics");
    stats->add_option("dataset", sa.dataset, "Dataset file")->required();
    stats->add_option("--out", sa.out, "Output CSV (default stdout)");
    stats->add_option("--histogram", sa.histogram, "Also write a length histogram CSV");

    MineArgs ma;
    auto* mine_cmd = app.add_subcommand("mine", "Frequent sequential pattern mining");
    mine_cmd->add_option("--dataset", ma.dataset, "Dataset file")->required();
    mine_cmd->add_option("--algo", ma.algo, "prefixspan, cm-spam, cm-spade or bruteforce")->capture_default_str()
        ->check(CLI::IsMember({"prefixspan", "cm-spam", "cm-spade", "bruteforce"}));
    mine_cmd->add_option("--min-support", ma.min_support, "Minimum number of supporting sequences")->capture_default_str()
        ->check(CLI::PositiveNumber);
    mine_cmd->add_option("--max-length", ma.max_length, "Maximum pattern length")->capture_default_str()->check(CLI::PositiveNumber);
    mine_cmd->add_option("--top", ma.top, "Keep only the first k patterns (0 = all)")->capture_default_str();
    mine_cmd->add_option("--subset", ma.subset, "positive, negative or all")->capture_default_str()
        ->check(CLI::IsMember({"positive", "negative", "all"}));
    mine_cmd->add_option("--alphabet", ma.alphabet, "Alphabet CSV, 'rugby' or 'none'")->capture_default_str();
    mine_cmd->add_flag("--no-cmap", ma.no_cmap, "Disable co-occurrence map pruning");
    mine_cmd->add_option("--out", ma.out, "Output CSV (default stdout)");

    TrainArgs ta;
    auto* train = app.add_subcommand("train", "Fit a sparse pattern classifier with cross-validated lambda");
    train->add_option("--dataset", ta.dataset, "Labeled dataset file")->required();
    train->add_option("--max-length", ta.max_length, "Maximum pattern length")->capture_default_str()->check(CLI::PositiveNumber);
    train->add_option("--min-support", ta.min_support, "Support floor recorded for reporting")->capture_default_str();
    train->add_option("--folds", ta.folds, "Cross-validation folds")->capture_default_str()->check(CLI::Range(2, 1000000));
    train->add_option("--repeats", ta.repeats, "Cross-validation repeats")->capture_default_str()->check(CLI::PositiveNumber);
    train->add_option("--grid", ta.grid, "Number of lambda values")->capture_default_str()->check(CLI::PositiveNumber);
    train->add_option("--grid-ratio", ta.grid_ratio, "Smallest lambda as a fraction of lambda_max")->capture_default_str()
        ->check(CLI::Range(1e-12, 0.999999));
    train->add_option("--tol", ta.tol, "Relative duality gap tolerance")->capture_default_str()->check(CLI::PositiveNumber);
    train->add_option("--seed", ta.seed, "Cross-validation seed")->capture_default_str();
    train->add_option("--threads", ta.threads, "Worker threads (default SEQPAT_THREADS or 1)");
    train->add_option("--alphabet", ta.alphabet, "Alphabet CSV, 'rugby' or 'none'")->capture_default_str();
    train->add_option("--out", ta.out, "Model JSON")->required();
    train->add_option("--cv-out", ta.cv_out, "Cross-validation table CSV");

    ReportArgs ra;
    auto* report = app.add_subcommand("report", "Top positive-weight patterns of a model");
    report->add_option("--model", ra.model, "Model JSON")->required();
    report->add_option("--dataset", ra.dataset, "Recount supports on this dataset");
    report->add_option("--alphabet", ra.alphabet, "Alphabet CSV, 'rugby' or 'none'")->capture_default_str();
    report->add_option("--top", ra.top, "Rows to keep")->capture_default_str()->check(CLI::PositiveNumber);
    report->add_option("--min-support", ra.min_support, "Drop patterns below this support")->capture_default_str();
    report->add_option("--format", ra.format, "csv or json")->capture_default_str()->check(CLI::IsMember({"csv", "json"}));
    report->add_option("--out", ra.out, "Output file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        std::cout << app.help();
        return 0;
    } catch (const CLI::CallForVersion&) {
        std::cout << SEQPAT_VERSION << '\n';
        return 0;
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n\n";
        const auto* sub = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
        std::cerr << sub->help();
        return 2;
    }

    try {
        if (*delimit) return run_delimit(da);
        if (*build) return run_build(ba);
        if (*stats) return run_stats(sa);
        if (*mine_cmd) return run_mine(ma);
        if (*train) return run_train(ta);
        if (*report) return run_report(ra);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
