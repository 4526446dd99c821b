// ponos command-line tool: ingest thread dumps, score content, evaluate
// classifiers, run nearest-neighbor lookups, and predict scores for unseen
// text. Exit codes: 0 success, 1 data error, 2 usage error, 3 backend error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "ponos/ponos.hpp"

namespace {

int exit_code_for(const ponos::Error& error) {
    switch (error.kind()) {
        case ponos::ErrorKind::config:
        case ponos::ErrorKind::invalid_argument:
        case ponos::ErrorKind::template_render:
        case ponos::ErrorKind::io:
            return 2;
        case ponos::ErrorKind::transport:
        case ponos::ErrorKind::backend_unavailable:
        case ponos::ErrorKind::unparseable_label:
        case ponos::ErrorKind::generation_incomplete:
            return 3;
        default:
            return 1;
    }
}

// flag > PONOS_<NAME> environment variable > fallback.
template <typename T>
T resolve_setting(const CLI::Option* flag, const T& flag_value, const std::string& env_key,
                  const T& fallback) {
    if (flag != nullptr && flag->count() > 0) return flag_value;
    if (auto env = ponos::config::env_override(env_key)) {
        std::istringstream stream(*env);
        T parsed;
        stream >> parsed;
        if (stream.fail()) {
            throw ponos::ConfigError("PONOS_" + env_key + " has a bad value: " + *env);
        }
        return parsed;
    }
    return fallback;
}

ponos::CorpusStore load_store(const std::string& dir) {
    if (!std::filesystem::exists(std::filesystem::path(dir) / "items.jsonl")) {
        throw ponos::IoError("store directory '" + dir + "' has no items.jsonl");
    }
    return ponos::CorpusStore::load(dir);
}

std::uint64_t session_seed() { return ponos::config::seed_from_env_or_random(); }

struct IngestArgs {
    std::string input;
    std::string store_dir;
    std::string context;
    std::string locale;
};

int cmd_ingest(const IngestArgs& args) {
    std::ifstream input(args.input);
    if (!input) throw ponos::IoError("cannot open input file '" + args.input + "'");
    ponos::ContextDescriptor context{args.context, std::nullopt};
    if (!args.locale.empty()) context.locale = args.locale;
    ponos::IngestStats stats;
    ponos::CorpusStore store = ponos::ingest_threads(input, context, &stats);
    store.save(args.store_dir);
    for (const std::string& warning : stats.warnings) std::cerr << "warning: " << warning << "\n";
    for (const std::string& error : stats.errors) std::cerr << "error: " << error << "\n";
    std::cout << "posts=" << stats.posts << " comments=" << stats.comments
              << " orphans=" << stats.orphans << " parse_errors=" << stats.parse_errors << "\n";
    return 0;
}

struct ScoreArgs {
    std::string store_dir;
    std::string variant = "basic";
    std::string classifier_config;
    std::string out;
    double lambda = 0.0;
    std::size_t min_replies = 4;
    std::size_t parallel = 0;
    const CLI::Option* lambda_opt = nullptr;
    const CLI::Option* min_replies_opt = nullptr;
    const CLI::Option* parallel_opt = nullptr;
};

int cmd_score(const ScoreArgs& args) {
    ponos::PonosVariant variant;
    try {
        variant = ponos::variant_from_string(args.variant);
    } catch (const ponos::ParseError&) {
        throw ponos::ConfigError("unknown variant '" + args.variant +
                                 "' (expected basic, weighted, or net)");
    }
    bool lambda_given = args.lambda_opt != nullptr && args.lambda_opt->count() > 0;
    if (variant == ponos::PonosVariant::weighted && !lambda_given) {
        throw ponos::ConfigError("the weighted variant requires --lambda");
    }
    if (variant != ponos::PonosVariant::weighted && lambda_given) {
        throw ponos::ConfigError("--lambda is valid only for the weighted variant");
    }
    if (lambda_given && args.lambda < 0.0) {
        throw ponos::ConfigError("--lambda must be non-negative");
    }
    std::size_t min_replies =
        resolve_setting(args.min_replies_opt, args.min_replies, "MIN_REPLIES", std::size_t{4});
    std::size_t parallel = resolve_setting(args.parallel_opt, args.parallel, "PARALLEL",
                                           std::size_t{std::thread::hardware_concurrency()});
    if (min_replies < 1) throw ponos::ConfigError("--min-replies must be >= 1");

    ponos::CorpusStore store = load_store(args.store_dir);
    ponos::ClassifierConfig config = ponos::classifier_config_from_file(args.classifier_config);
    config.seed = session_seed();
    parallel = std::min(parallel, static_cast<std::size_t>(config.max_parallel_requests));
    ponos::SentimentClassifier classifier(std::move(config));

    std::vector<std::string> target_ids;
    for (const std::string& id : store.ids()) {
        if (store.in_orphan_subtree(id)) continue;
        if (!store.replies_of(id).empty()) target_ids.push_back(id);
    }
    std::sort(target_ids.begin(), target_ids.end());

    std::vector<nlohmann::json> lines(target_ids.size());
    std::size_t scored = 0;
    std::size_t insufficient = 0;
    std::mutex counter_mutex;
    ponos::util::parallel_for(target_ids.size(), parallel, [&](std::size_t i) {
        const ponos::ContentItem& target = *store.lookup(target_ids[i]);
        std::vector<const ponos::ContentItem*> reply_ptrs = store.replies_of(target.id);
        if (reply_ptrs.size() < min_replies) {
            lines[i] = nlohmann::json{{"content_id", target.id},
                                      {"context", target.context.community_id},
                                      {"status", "insufficient_replies"},
                                      {"n_replies", reply_ptrs.size()}};
            std::lock_guard<std::mutex> lock(counter_mutex);
            ++insufficient;
            return;
        }
        std::vector<ponos::ContentItem> replies;
        replies.reserve(reply_ptrs.size());
        for (const ponos::ContentItem* reply : reply_ptrs) replies.push_back(*reply);
        ponos::ClassificationRequest request =
            ponos::detail::request_for_target(store, target, std::move(replies));
        std::vector<ponos::ReactionRecord> records = classifier.classify_replies(request);
        ponos::PonosScore score;
        const std::string& classifier_id = classifier.config().classifier_id;
        switch (variant) {
            case ponos::PonosVariant::basic:
                score = ponos::ponos_basic(records, classifier_id);
                break;
            case ponos::PonosVariant::net:
                score = ponos::ponos_net(records, classifier_id);
                break;
            case ponos::PonosVariant::weighted: {
                // Recency decays relative to the newest reply in the thread.
                std::int64_t reference_time = records.front().reply.created_at;
                for (const ponos::ReactionRecord& r : records) {
                    reference_time = std::max(reference_time, r.reply.created_at);
                }
                score = ponos::ponos_time_weighted(records, reference_time, args.lambda,
                                                   classifier_id);
                break;
            }
        }
        lines[i] = ponos::to_json(
            ponos::make_score_report(target.id, target.context.community_id, score));
        std::lock_guard<std::mutex> lock(counter_mutex);
        ++scored;
    });

    std::string output;
    for (const nlohmann::json& line : lines) {
        output += line.dump();
        output += '\n';
    }
    ponos::util::write_file_atomic(args.out, output);
    std::cout << "scored=" << scored << " insufficient=" << insufficient << "\n";
    return 0;
}

struct SelectArgs {
    std::string store_dir;
    std::size_t min_replies = 4;
    std::size_t max_replies = 7;
    std::string out;
};

int cmd_select(const SelectArgs& args) {
    ponos::CorpusStore store = load_store(args.store_dir);
    std::vector<ponos::TestSetEntry> selected =
        ponos::select_test_set(store, args.min_replies, args.max_replies);
    std::string output;
    for (const ponos::TestSetEntry& entry : selected) {
        nlohmann::json reply_ids = nlohmann::json::array();
        for (const ponos::ContentItem& reply : entry.replies) reply_ids.push_back(reply.id);
        output += nlohmann::json{{"target_id", entry.target.id}, {"reply_ids", reply_ids}}.dump();
        output += '\n';
    }
    if (args.out.empty()) {
        std::cout << output;
    } else {
        ponos::util::write_file_atomic(args.out, output);
    }
    std::cout << "selected=" << selected.size() << "\n";
    return 0;
}

struct EvalArgs {
    std::string store_dir;
    std::string gold;
    std::string classifier_config;
    std::string out;
    std::size_t parallel = 0;
    const CLI::Option* parallel_opt = nullptr;
};

int cmd_eval(const EvalArgs& args) {
    ponos::CorpusStore store = load_store(args.store_dir);
    std::string gold_content = ponos::util::read_file(args.gold);
    std::vector<ponos::ReactionRecord> gold = ponos::load_gold_labels(gold_content, store);
    ponos::ClassifierConfig config = ponos::classifier_config_from_file(args.classifier_config);
    config.seed = session_seed();
    // Convenience: a gold_passthrough classifier without its own gold_file
    // reads the labels from --gold.
    if (config.backend == ponos::BackendKind::gold_passthrough && config.gold_labels.empty()) {
        config.gold_labels = ponos::load_gold_label_map(gold_content);
    }
    std::size_t parallel = resolve_setting(args.parallel_opt, args.parallel, "PARALLEL",
                                           std::size_t{std::thread::hardware_concurrency()});
    std::size_t max_parallel = static_cast<std::size_t>(config.max_parallel_requests);
    ponos::SentimentClassifier classifier(std::move(config));
    ponos::EvalOptions options;
    options.parallel = std::min(parallel, max_parallel);
    ponos::EvalReport report = ponos::evaluate_classifier(store, gold, classifier, options);
    std::cout << ponos::render_table(report);
    if (!args.out.empty()) {
        ponos::util::write_file_atomic(args.out, ponos::to_json(report).dump(2) + "\n");
    }
    return 0;
}

struct KnnBuildArgs {
    std::string embeddings;
    std::string scores;
    std::string out;
};

int cmd_knn_build(const KnnBuildArgs& args) {
    std::vector<ponos::EmbeddingRecord> embeddings =
        ponos::load_embedding_records(ponos::util::read_file(args.embeddings));
    std::vector<ponos::ScoreReportRecord> scores;
    int line_no = 0;
    for (const std::string& raw : ponos::util::split_lines(ponos::util::read_file(args.scores))) {
        ++line_no;
        std::string_view line = ponos::util::trim(raw);
        if (line.empty()) continue;
        nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded()) {
            throw ponos::ParseError("score line " + std::to_string(line_no) + " is not valid JSON");
        }
        if (j.contains("status")) continue;  // skip insufficient-replies markers
        scores.push_back(ponos::score_report_from_json(j));
    }
    std::vector<ponos::IndexRecord> joined =
        ponos::join_embeddings_with_scores(std::move(embeddings), scores);
    ponos::util::write_file_atomic(args.out, ponos::index_records_to_jsonl(joined));
    std::cout << "indexed=" << joined.size() << "\n";
    return 0;
}

struct KnnQueryArgs {
    std::string index;
    std::string vector_file;
    double tau = 0.8;
    const CLI::Option* tau_opt = nullptr;
};

int cmd_knn_query(const KnnQueryArgs& args) {
    double tau = resolve_setting(args.tau_opt, args.tau, "TAU", 0.8);
    std::vector<ponos::IndexRecord> records =
        ponos::index_records_from_jsonl(ponos::util::read_file(args.index));
    ponos::NeighborIndex index = ponos::build_index(records, tau);
    nlohmann::json query_json = nlohmann::json::parse(ponos::util::read_file(args.vector_file),
                                                      nullptr, false);
    if (query_json.is_discarded() || !query_json.is_object() || !query_json.contains("vector")) {
        throw ponos::ParseError("vector file must be a JSON object with a 'vector' field");
    }
    std::vector<double> query = query_json["vector"].get<std::vector<double>>();
    std::optional<ponos::NeighborResult> result = index.query_nearest(query);
    if (!result) {
        std::cout << "no neighbor found (tau=" << tau << ")\n";
        return 0;
    }
    char buffer[160];
    std::snprintf(buffer, sizeof(buffer), "content_id=%s similarity=%.4f value=%.4f n_replies=%zu\n",
                  result->content_id.c_str(), result->similarity, result->score.value,
                  result->score.n_replies);
    std::cout << buffer;
    return 0;
}

struct PredictArgs {
    std::string input;
    std::string generator_config;
    std::string classifier_config;
    std::string out;
    std::size_t k = 5;
    std::size_t parallel = 0;
    const CLI::Option* k_opt = nullptr;
    const CLI::Option* parallel_opt = nullptr;
};

int cmd_predict(const PredictArgs& args) {
    std::vector<ponos::PredictionInput> inputs =
        ponos::load_prediction_inputs(ponos::util::read_file(args.input));
    std::uint64_t seed = session_seed();
    ponos::GeneratorConfig generator_config =
        ponos::generator_config_from_file(args.generator_config);
    generator_config.k_replies =
        resolve_setting(args.k_opt, args.k, "K", generator_config.k_replies);
    generator_config.seed = seed;
    ponos::ClassifierConfig classifier_config =
        ponos::classifier_config_from_file(args.classifier_config);
    classifier_config.seed = seed;
    std::size_t parallel = resolve_setting(args.parallel_opt, args.parallel, "PARALLEL",
                                           std::size_t{std::thread::hardware_concurrency()});
    parallel = std::min(parallel, static_cast<std::size_t>(classifier_config.max_parallel_requests));
    ponos::ReplyGenerator generator(std::move(generator_config));
    ponos::SentimentClassifier classifier(std::move(classifier_config));

    std::vector<nlohmann::json> lines(inputs.size());
    ponos::util::parallel_for(inputs.size(), parallel, [&](std::size_t i) {
        const ponos::PredictionInput& input = inputs[i];
        ponos::ContentItem candidate;
        candidate.id = input.id;
        candidate.kind = ponos::ItemKind::post;
        candidate.body = input.body;
        candidate.context.community_id = input.context;
        ponos::ContextDescriptor context{input.context, std::nullopt};
        ponos::PonosScore score = ponos::predict_ponos(candidate, context, generator, classifier);
        lines[i] = ponos::to_json(ponos::make_score_report(input.id, input.context, score));
    });

    std::string output;
    for (const nlohmann::json& line : lines) {
        output += line.dump();
        output += '\n';
    }
    if (args.out.empty()) {
        std::cout << output;
    } else {
        ponos::util::write_file_atomic(args.out, output);
        std::cout << "predicted=" << inputs.size() << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"PONOS toxicity-scoring engine: community-reaction metrics over threaded content"};
    app.require_subcommand(1);

    IngestArgs ingest_args;
    CLI::App* ingest = app.add_subcommand("ingest", "Parse a JSONL thread dump into a store");
    ingest->add_option("--input", ingest_args.input, "Thread-record JSONL file")->required();
    ingest->add_option("--store", ingest_args.store_dir, "Store directory to write")->required();
    ingest->add_option("--context", ingest_args.context, "Community id for the corpus")->required();
    ingest->add_option("--locale", ingest_args.locale, "Optional locale tag");

    ScoreArgs score_args;
    CLI::App* score = app.add_subcommand("score", "Compute PONOS for every stored target");
    score->add_option("--store", score_args.store_dir, "Store directory")->required();
    score->add_option("--variant", score_args.variant, "Score variant: basic, weighted, or net")
        ->capture_default_str();
    score->add_option("--classifier", score_args.classifier_config, "Classifier config file")
        ->required();
    score->add_option("--out", score_args.out, "Output score-report JSONL")->required();
    score_args.lambda_opt =
        score->add_option("--lambda", score_args.lambda, "Time-decay rate (weighted variant only)");
    score_args.min_replies_opt =
        score->add_option("--min-replies", score_args.min_replies,
                          "Minimum replies for a reliable score")
            ->capture_default_str();
    score_args.parallel_opt =
        score->add_option("--parallel", score_args.parallel, "Worker threads (default: cores)");

    SelectArgs select_args;
    CLI::App* select = app.add_subcommand("select", "Select the well-replied evaluation targets");
    select->add_option("--store", select_args.store_dir, "Store directory")->required();
    select->add_option("--min-replies", select_args.min_replies, "Minimum direct replies")
        ->capture_default_str();
    select->add_option("--max-replies", select_args.max_replies,
                       "Keep at most this many top-score replies")
        ->capture_default_str();
    select->add_option("--out", select_args.out, "Output JSONL (default: stdout)");

    EvalArgs eval_args;
    CLI::App* eval = app.add_subcommand("eval", "Evaluate a classifier against gold labels");
    eval->add_option("--store", eval_args.store_dir, "Store directory")->required();
    eval->add_option("--gold", eval_args.gold, "Gold-label JSON file")->required();
    eval->add_option("--classifier", eval_args.classifier_config, "Classifier config file")
        ->required();
    eval->add_option("--out", eval_args.out, "Optional JSON report path");
    eval_args.parallel_opt =
        eval->add_option("--parallel", eval_args.parallel, "Worker threads (default: cores)");

    CLI::App* knn = app.add_subcommand("knn", "Nearest-neighbor score prediction");
    knn->require_subcommand(1);
    KnnBuildArgs knn_build_args;
    CLI::App* knn_build = knn->add_subcommand("build", "Join embeddings with scores into an index");
    knn_build->add_option("--embeddings", knn_build_args.embeddings, "Embedding JSONL file")
        ->required();
    knn_build->add_option("--scores", knn_build_args.scores, "Score-report JSONL file")->required();
    knn_build->add_option("--out", knn_build_args.out, "Index JSONL to write")->required();
    KnnQueryArgs knn_query_args;
    CLI::App* knn_query = knn->add_subcommand("query", "Find the nearest scored neighbor");
    knn_query->add_option("--index", knn_query_args.index, "Index JSONL file")->required();
    knn_query->add_option("--vector-file", knn_query_args.vector_file,
                          "JSON file with a 'vector' field")
        ->required();
    knn_query_args.tau_opt =
        knn_query->add_option("--tau", knn_query_args.tau, "Minimum similarity to accept")
            ->capture_default_str();

    PredictArgs predict_args;
    CLI::App* predict =
        app.add_subcommand("predict", "Predict PONOS for unseen text via generated replies");
    predict->add_option("--input", predict_args.input, "Batch JSONL of {id, body, context}")
        ->required();
    predict->add_option("--generator", predict_args.generator_config, "Generator config file")
        ->required();
    predict->add_option("--classifier", predict_args.classifier_config, "Classifier config file")
        ->required();
    predict_args.k_opt =
        predict->add_option("--k", predict_args.k, "Replies to generate per candidate")
            ->capture_default_str();
    predict->add_option("--out", predict_args.out, "Output score-report JSONL (default: stdout)");
    predict_args.parallel_opt =
        predict->add_option("--parallel", predict_args.parallel, "Worker threads (default: cores)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (ingest->parsed()) return cmd_ingest(ingest_args);
        if (score->parsed()) return cmd_score(score_args);
        if (select->parsed()) return cmd_select(select_args);
        if (eval->parsed()) return cmd_eval(eval_args);
        if (knn->parsed()) {
            if (knn_build->parsed()) return cmd_knn_build(knn_build_args);
            if (knn_query->parsed()) return cmd_knn_query(knn_query_args);
        }
        if (predict->parsed()) return cmd_predict(predict_args);
    } catch (const ponos::Error& e) {
        std::cerr << e.what() << "\n";
        return exit_code_for(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
