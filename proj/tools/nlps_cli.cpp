// nlps: command-line front end for corpus construction, statistics,
// retrieval baselines and evaluation.

#include <openssl/evp.h>

#include <algorithm>
#include <chrono>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "nlps/nlps.hpp"

namespace fs = std::filesystem;
using nlps::json;

namespace {

constexpr const char* kVersion = "0.1.0";

std::string hex(const unsigned char* p, unsigned n) {
    static const char* digits = "0123456789abcdef";
    std::string s;
    for (unsigned i = 0; i < n; ++i) {
        s.push_back(digits[p[i] >> 4]);
        s.push_back(digits[p[i] & 15]);
    }
    return s;
}

std::string sha256(std::string_view data) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned n = 0;
    EVP_Digest(data.data(), data.size(), md, &n, EVP_sha256(), nullptr);
    return hex(md, n);
}

// Files hash their content; directories hash the sorted list of
// (relative path, content hash) lines, skipping manifests.
std::string hash_input(const fs::path& p) {
    if (!fs::is_directory(p)) return sha256(nlps::read_file(p));
    std::vector<std::string> lines;
    for (const auto& item : fs::recursive_directory_iterator(p)) {
        if (!item.is_regular_file() || item.path().filename() == "manifest.json") continue;
        lines.push_back(fs::relative(item.path(), p).generic_string() + "\t" + sha256(nlps::read_file(item.path())));
    }
    std::sort(lines.begin(), lines.end());
    std::string all;
    for (const auto& l : lines) all += l + "\n";
    return sha256(all);
}

std::string utc_now() {
    std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

struct Manifest {
    explicit Manifest(std::string name) : subcommand(std::move(name)) {}

    std::string subcommand;
    std::string started_at = utc_now();
    std::vector<fs::path> inputs;
    std::uint64_t seed = 0;

    void write(const CLI::App& sub, const fs::path& path) const {
        json flags = json::object();
        for (const CLI::Option* opt : sub.get_options()) {
            if (opt->get_name() == "--help") continue;
            auto results = opt->results();
            std::string name = opt->get_name();
            if (opt->get_type_size() == 0) flags[name] = opt->count() > 0;
            else if (!results.empty()) flags[name] = results.size() == 1 ? json(results[0]) : json(results);
            else flags[name] = opt->get_default_str().empty() ? json(nullptr) : json(opt->get_default_str());
        }
        json in = json::array();
        for (const fs::path& p : inputs) in.push_back({{"path", p.string()}, {"sha256", hash_input(p)}});
        json m{{"subcommand", subcommand}, {"flags", flags},   {"inputs", in},
               {"tool_version", kVersion}, {"seed", seed},     {"started_at", started_at},
               {"finished_at", utc_now()}};
        nlps::write_json_file(path, m);
    }
};

fs::path manifest_beside(const fs::path& out) { return fs::path(out.string() + ".manifest.json"); }

struct Common {
    std::uint64_t seed = 1;
    unsigned workers = 1;
};

std::vector<nlps::TokenStream> read_token_file(const fs::path& path, nlps::Strategy expected) {
    std::vector<nlps::TokenStream> out;
    std::string data = nlps::read_file(path);
    std::size_t offset = 0;
    for (std::string_view line : nlps::text::split_lines(data)) {
        if (!nlps::text::trim(line).empty()) {
            json j;
            try {
                j = json::parse(line);
            } catch (const json::exception& e) {
                throw nlps::ParseError(std::string("bad token line: ") + e.what(), offset);
            }
            nlps::TokenStream ts;
            ts.source_id = j.at("id").get<std::string>();
            ts.tokens = j.at("tokens").get<std::vector<std::string>>();
            ts.strategy = nlps::strategy_from_string(j.value("strategy", std::string(nlps::to_string(expected))));
            if (ts.strategy != expected)
                throw nlps::ConfigError("token file uses strategy '" + std::string(nlps::to_string(ts.strategy)) +
                                        "' but --strategy is '" + std::string(nlps::to_string(expected)) + "'");
            out.push_back(std::move(ts));
        }
        offset += line.size() + 1;
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Natural premise selection corpus and baseline toolkit", "nlps"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(0, 1);

    std::vector<std::string> strategies;
    for (nlps::Strategy s : nlps::kAllStrategies) strategies.emplace_back(nlps::to_string(s));

    // build
    auto* build = app.add_subcommand("build", "Parse wiki pages into corpus JSON files");
    fs::path b_source, b_out, b_rules, b_tags;
    std::size_t b_min_count = 100;
    Common b_common;
    build->add_option("--source", b_source, "Directory of .wiki files or a MediaWiki XML export")->required();
    build->add_option("--out", b_out, "Output corpus directory")->required();
    build->add_option("--category-rules", b_rules, "Category harmonization rules (JSON)");
    build->add_option("--min-count", b_min_count, "Drop harmonized categories with fewer entries")->capture_default_str();
    build->add_option("--exclude-tags", b_tags, "Maintenance templates that exclude a page, one per line");
    build->add_option("--workers", b_common.workers, "Worker threads")->capture_default_str();
    build->add_option("--seed", b_common.seed, "Seed (recorded only; the build is deterministic)")->capture_default_str();

    // validate
    auto* validate = app.add_subcommand("validate", "Check corpus invariants");
    fs::path v_corpus, v_out;
    validate->add_option("--corpus", v_corpus, "Corpus directory")->required();
    validate->add_option("--out", v_out, "Report file (default: stdout)");

    // tokenize
    auto* tok = app.add_subcommand("tokenize", "Tokenize statements as JSON lines");
    fs::path t_corpus, t_out;
    std::string t_strategy;
    bool t_drop_delims = false;
    tok->add_option("--in", t_corpus, "Corpus directory")->required();
    tok->add_option("--strategy", t_strategy, "expr-word, tokenised or char")
        ->required()
        ->check(CLI::IsMember(strategies));
    tok->add_flag("--drop-math-delimiters", t_drop_delims, "char strategy: omit $ and other delimiters");
    tok->add_option("--out", t_out, "Output .jsonl file")->required();

    // stats
    auto* stats = app.add_subcommand("stats", "Corpus and premise graph statistics");
    fs::path s_corpus, s_out;
    stats->add_option("--corpus", s_corpus, "Corpus directory")->required();
    stats->add_option("--out", s_out, "Report file")->required();

    // hops
    auto* hops = app.add_subcommand("hops", "k-hop gold premise sets");
    fs::path h_corpus, h_out;
    std::size_t h_k = 1;
    hops->add_option("--corpus", h_corpus, "Corpus directory")->required();
    hops->add_option("--k", h_k, "Maximum path length")->required()->check(CLI::PositiveNumber);
    hops->add_option("--out", h_out, "Output file")->required();

    // train
    auto* train = app.add_subcommand("train", "Fit a TF-IDF or PV-DBOW model");
    fs::path tr_corpus, tr_tokens, tr_out;
    std::string tr_method;
    std::string tr_strategy;
    nlps::PvDbowParams tr_params;
    train->add_option("--method", tr_method, "tfidf or pvdbow")->required()->check(CLI::IsMember({"tfidf", "pvdbow"}));
    train->add_option("--strategy", tr_strategy, "expr-word, tokenised or char")
        ->required()
        ->check(CLI::IsMember(strategies));
    auto* tr_corpus_opt = train->add_option("--corpus", tr_corpus, "Corpus directory");
    auto* tr_tokens_opt = train->add_option("--tokens", tr_tokens, "Token file written by `tokenize`");
    tr_corpus_opt->excludes(tr_tokens_opt);
    train->add_option("--dim", tr_params.dim, "PV-DBOW embedding size")->capture_default_str();
    train->add_option("--epochs", tr_params.epochs, "PV-DBOW epochs")->capture_default_str();
    train->add_option("--negative", tr_params.negative, "PV-DBOW negative samples")->capture_default_str();
    train->add_option("--min-count", tr_params.min_count, "PV-DBOW minimum token count")->capture_default_str();
    train->add_option("--seed", tr_params.seed, "Random seed")->capture_default_str();
    train->add_option("--out", tr_out, "Model file")->required();

    // evaluate
    auto* eval = app.add_subcommand("evaluate", "MAP of a model or an external score file");
    fs::path e_model, e_scores, e_corpus, e_out;
    nlps::EvaluationConfig e_cfg;
    std::optional<std::string> e_method, e_category;
    std::string e_pool = "category", e_strategy;
    eval->add_option("--model", e_model, "Model file written by `train`");
    eval->add_option("--scores", e_scores, "Score TSV (query_id, candidate_id, score)");
    eval->add_option("--corpus", e_corpus, "Corpus directory")->required();
    eval->add_option("--hops", e_cfg.hop_k, "Gold premises within this many hops")->capture_default_str()->check(
        CLI::PositiveNumber);
    eval->add_option("--strategy", e_strategy, "Tokenization strategy the model was trained with")
        ->required()
        ->check(CLI::IsMember(strategies));
    eval->add_option("--method", e_method, "tfidf, pvdbow or external-scores (default: from the input)")
        ->check(CLI::IsMember({"tfidf", "pvdbow", "external-scores"}));
    eval->add_option("--category", e_category, "Restrict queries (and by default candidates) to a category");
    eval->add_option("--pool", e_pool, "Candidate pool under --category: category or all")
        ->capture_default_str()
        ->check(CLI::IsMember({"category", "all"}));
    eval->add_option("--seed", e_cfg.seed, "Seed recorded in the report")->capture_default_str();
    eval->add_option("--workers", e_cfg.workers, "Worker threads")->capture_default_str();
    eval->add_option("--out", e_out, "Report file")->required();

    // export-pairs
    auto* pairs = app.add_subcommand("export-pairs", "Write train/dev pair files for a pairwise scorer");
    fs::path p_corpus, p_out;
    nlps::EvaluationConfig p_cfg;
    nlps::PairExportOptions p_opts;
    std::optional<std::string> p_category;
    pairs->add_option("--corpus", p_corpus, "Corpus directory")->required();
    pairs->add_option("--hops", p_cfg.hop_k, "Gold premises within this many hops")->capture_default_str()->check(
        CLI::PositiveNumber);
    pairs->add_option("--category", p_category, "Restrict queries and candidates to a category");
    pairs->add_option("--negative-ratio", p_opts.negative_ratio, "Negatives per positive")->capture_default_str();
    pairs->add_option("--dev-fraction", p_opts.dev_fraction, "Fraction of queries in the dev split")
        ->capture_default_str();
    pairs->add_option("--seed", p_opts.seed, "Random seed")->capture_default_str();
    pairs->add_option("--out", p_out, "Output directory (train.tsv, dev.tsv)")->required();

    if (argc < 2) {
        std::cerr << app.help();
        return 2;
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }
    if (app.get_subcommands().empty()) {
        std::cerr << app.help();
        return 2;
    }

    try {
        if (build->parsed()) {
            Manifest m{"build"};
            m.inputs = {b_source};
            m.seed = b_common.seed;
            nlps::wiki::BuildOptions opts;
            if (!b_rules.empty()) {
                opts.category_rules = nlps::wiki::load_category_rules(b_rules);
                m.inputs.push_back(b_rules);
            }
            if (!b_tags.empty()) {
                opts.exclude_tags = nlps::wiki::load_exclude_tags(b_tags);
                m.inputs.push_back(b_tags);
            }
            opts.min_count = b_min_count;
            opts.workers = b_common.workers;
            nlps::wiki::BuildResult r = nlps::wiki::build_corpus(nlps::wiki::load_pages(b_source), opts);
            nlps::save_corpus(r.corpus, b_out);
            nlps::write_json_file(b_out / "build_report.json", nlps::wiki::to_json(r.report, r.corpus));
            m.write(*build, b_out / "manifest.json");
            nlps::ValidationReport v = nlps::validate_corpus(r.corpus);
            if (!v.valid()) {
                fs::path rp = b_out / "validation_report.json";
                nlps::write_json_file(rp, nlps::to_json(v));
                std::cerr << "error: built corpus failed validation; report: " << rp.string() << "\n";
                return 1;
            }
            std::cout << "built " << r.corpus.size() << " entries from " << r.report.pages_total << " pages into "
                      << b_out.string() << "\n";
        } else if (validate->parsed()) {
            nlps::ValidationReport v = nlps::validate_corpus(nlps::load_entries(v_corpus));
            json j = nlps::to_json(v);
            if (!v_out.empty()) nlps::write_json_file(v_out, j);
            else std::cout << j.dump(2) << "\n";
            if (!v.valid()) {
                std::cerr << "error: " << v.issues.size()
                          << " validation issue(s); report: " << (v_out.empty() ? "<stdout>" : v_out.string()) << "\n";
                return 1;
            }
        } else if (tok->parsed()) {
            Manifest m{"tokenize"};
            m.inputs = {t_corpus};
            nlps::TokenizeOptions opts;
            opts.keep_math_delimiters = !t_drop_delims;
            std::string out;
            nlps::Strategy strategy = nlps::strategy_from_string(t_strategy);
            for (const auto& ts : nlps::tokenize_corpus(nlps::load_corpus(t_corpus), strategy, opts)) {
                for (const std::string& w : ts.warnings) std::cerr << "warning: " << ts.source_id << ": " << w << "\n";
                out += json{{"id", ts.source_id}, {"strategy", nlps::to_string(ts.strategy)}, {"tokens", ts.tokens}}
                           .dump() +
                       "\n";
            }
            nlps::write_file(t_out, out);
            m.write(*tok, manifest_beside(t_out));
        } else if (stats->parsed()) {
            Manifest m{"stats"};
            m.inputs = {s_corpus};
            nlps::Corpus corpus = nlps::load_corpus(s_corpus);
            nlps::write_json_file(s_out, nlps::to_json(nlps::compute_stats(corpus, nlps::build_graph(corpus))));
            m.write(*stats, manifest_beside(s_out));
        } else if (hops->parsed()) {
            Manifest m{"hops"};
            m.inputs = {h_corpus};
            nlps::Corpus corpus = nlps::load_corpus(h_corpus);
            nlps::PremiseGraph g = nlps::build_graph(corpus);
            json gold = json::object();
            for (const nlps::Entry& e : corpus.entries()) {
                if (e.kind != nlps::EntryKind::Definition && g.contains(e.id)) {
                    auto ids = nlps::k_hop_premises(g, e.id, h_k);
                    if (!ids.empty()) gold[e.id] = ids;
                }
            }
            nlps::write_json_file(h_out, json{{"k", h_k}, {"gold", gold}});
            m.write(*hops, manifest_beside(h_out));
        } else if (train->parsed()) {
            Manifest m{"train"};
            m.seed = tr_params.seed;
            std::vector<nlps::TokenStream> streams;
            if (!tr_tokens.empty()) {
                m.inputs = {tr_tokens};
                streams = read_token_file(tr_tokens, nlps::strategy_from_string(tr_strategy));
            } else if (!tr_corpus.empty()) {
                m.inputs = {tr_corpus};
                streams =
                    nlps::tokenize_corpus(nlps::load_corpus(tr_corpus), nlps::strategy_from_string(tr_strategy));
            } else {
                throw nlps::ConfigError("train needs --corpus or --tokens");
            }
            nlps::RetrievalModel model;
            if (tr_method == "tfidf") model = nlps::fit_tfidf(std::move(streams));
            else model = nlps::train_pvdbow(streams, tr_params);
            nlps::save_model(model, tr_out);
            m.write(*train, manifest_beside(tr_out));
        } else if (eval->parsed()) {
            Manifest m{"evaluate"};
            m.seed = e_cfg.seed;
            m.inputs = {e_corpus};
            e_cfg.strategy = nlps::strategy_from_string(e_strategy);
            e_cfg.category_filter = e_category;
            e_cfg.candidate_pool =
                e_pool == "all" ? nlps::CandidatePool::AllEntries : nlps::CandidatePool::CategoryRestricted;
            nlps::Corpus corpus = nlps::load_corpus(e_corpus);
            nlps::EvaluationReport report;
            bool external = e_method ? *e_method == "external-scores" : !e_scores.empty();
            if (external) {
                if (e_scores.empty()) throw nlps::ConfigError("--method external-scores needs --scores");
                if (!e_model.empty()) throw nlps::ConfigError("--model and --scores are mutually exclusive");
                m.inputs.push_back(e_scores);
                nlps::ScoreTable scores = nlps::read_scores_tsv(nlps::read_file(e_scores), &corpus);
                report = nlps::evaluate_external(corpus, scores, e_cfg);
            } else {
                if (e_model.empty()) throw nlps::ConfigError("evaluate needs --model or --scores");
                m.inputs.push_back(e_model);
                nlps::RetrievalModel model = nlps::load_model(e_model);
                e_cfg.method = e_method ? nlps::method_from_string(*e_method)
                                        : nlps::method_from_string(nlps::method_name(model));
                report = nlps::evaluate(corpus, model, e_cfg);
            }
            nlps::write_json_file(e_out, nlps::to_json(report));
            m.write(*eval, manifest_beside(e_out));
            std::cout << "MAP " << report.map_score << " over " << report.num_queries << " queries\n";
        } else if (pairs->parsed()) {
            Manifest m{"export-pairs"};
            m.seed = p_opts.seed;
            m.inputs = {p_corpus};
            p_cfg.category_filter = p_category;
            nlps::Corpus corpus = nlps::load_corpus(p_corpus);
            nlps::QuerySet qs = nlps::make_queries(corpus, nlps::build_graph(corpus), p_cfg);
            nlps::PairSplit split = nlps::export_pairs(corpus, qs, p_opts);
            fs::create_directories(p_out);
            nlps::write_file(p_out / "train.tsv", nlps::write_pairs_tsv(split.train));
            nlps::write_file(p_out / "dev.tsv", nlps::write_pairs_tsv(split.dev));
            m.write(*pairs, p_out / "manifest.json");
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
