#include <cmath>
#include <random>

#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"
#include "ponos/knn.hpp"
#include "ponos/metric.hpp"

using namespace ponos;

namespace {

PonosScore score_with_value(double value, std::size_t n = 4) {
    PonosScore score;
    score.value = value;
    score.n_replies = n;
    score.error = measurement_error(n);
    score.variant = PonosVariant::basic;
    score.classifier_id = "m";
    return score;
}

// Independent oracle: plain double loop over all entries.
struct ScanResult {
    std::string content_id;
    double similarity;
};

std::optional<ScanResult> exhaustive_scan(const std::vector<EmbeddingRecord>& records,
                                          const std::vector<double>& query, double tau) {
    std::optional<ScanResult> best;
    for (const EmbeddingRecord& record : records) {
        double similarity = cosine_similarity(record.vector, query);
        if (!best || similarity > best->similarity ||
            (similarity == best->similarity && record.content_id < best->content_id)) {
            best = ScanResult{record.content_id, similarity};
        }
    }
    if (best && best->similarity < tau) return std::nullopt;
    return best;
}

}  // namespace

TEST_CASE("cosine similarity closed-form values") {
    std::vector<double> a = {3.0, -1.0, 2.0};
    CHECK(cosine_similarity(a, a) == 1.0);
    CHECK(cosine_similarity({1.0, 0.0}, {0.0, 1.0}) == 0.0);
    CHECK_THAT(cosine_similarity({1.0, 0.0}, {1.0, 1.0}),
               Catch::Matchers::WithinAbs(1.0 / std::sqrt(2.0), 1e-4));
    CHECK(cosine_similarity({1.0}, {-2.0}) == -1.0);
}

TEST_CASE("cosine similarity error cases") {
    CHECK_THROWS_AS(cosine_similarity({1.0, 2.0}, {1.0}), DimensionError);
    CHECK_THROWS_AS(cosine_similarity({0.0, 0.0}, {1.0, 1.0}), ZeroVectorError);
    CHECK_THROWS_AS(cosine_similarity(std::vector<double>{}, std::vector<double>{}),
                    DimensionError);
}

TEST_CASE("embedding records reject zero vectors at insert") {
    CHECK_THROWS_AS(make_embedding_record("x", {0.0, 0.0}), ZeroVectorError);
    CHECK_THROWS_AS(make_embedding_record("x", {}), DimensionError);
    EmbeddingRecord record = make_embedding_record("x", {3.0, 4.0});
    CHECK_THAT(record.norm, Catch::Matchers::WithinAbs(5.0, 1e-12));
}

TEST_CASE("index rejects dimension mismatches") {
    NeighborIndex index(0.5);
    index.insert(make_embedding_record("a", {1.0, 0.0}), score_with_value(0.8));
    CHECK_THROWS_AS(index.insert(make_embedding_record("b", {1.0, 0.0, 0.0}),
                                 score_with_value(0.2)),
                    DimensionError);
    CHECK_THROWS_AS(index.query_nearest(std::vector<double>{1.0, 2.0, 3.0}), DimensionError);
    CHECK_THROWS_AS(index.query_nearest(std::vector<double>{0.0, 0.0}), ZeroVectorError);
}

TEST_CASE("query on an exact duplicate returns similarity 1") {
    NeighborIndex index;
    index.insert(make_embedding_record("a", {0.3, -0.7, 0.64}), score_with_value(0.25));
    auto result = index.query_nearest(std::vector<double>{0.3, -0.7, 0.64});
    REQUIRE(result.has_value());
    CHECK(result->content_id == "a");
    CHECK_THAT(result->similarity, Catch::Matchers::WithinAbs(1.0, 1e-9));
    CHECK(result->score.value == 0.25);
}

TEST_CASE("empty index returns no neighbor") {
    NeighborIndex index;
    CHECK_FALSE(index.query_nearest(std::vector<double>{1.0}).has_value());
}

TEST_CASE("two-candidate query picks the aligned axis") {
    NeighborIndex index(0.5);
    index.insert(make_embedding_record("x-axis", {1.0, 0.0}), score_with_value(0.8));
    index.insert(make_embedding_record("y-axis", {0.0, 1.0}), score_with_value(0.2));
    auto result = index.query_nearest(std::vector<double>{0.9, 0.1});
    REQUIRE(result.has_value());
    CHECK(result->content_id == "x-axis");
    CHECK(result->score.value == 0.8);
    CHECK_THAT(result->similarity, Catch::Matchers::WithinAbs(0.9939, 1e-4));
}

TEST_CASE("below-threshold best match is reported as absent") {
    NeighborIndex index(0.9);
    index.insert(make_embedding_record("a", {1.0, 0.0}), score_with_value(0.5));
    CHECK_FALSE(index.query_nearest(std::vector<double>{0.0, 1.0}).has_value());
    NeighborIndex permissive(-1.0);
    permissive.insert(make_embedding_record("a", {1.0, 0.0}), score_with_value(0.5));
    CHECK(permissive.query_nearest(std::vector<double>{0.0, 1.0}).has_value());
}

TEST_CASE("similarity ties break toward the smaller content id") {
    NeighborIndex index(0.0);
    index.insert(make_embedding_record("bbb", {2.0, 0.0}), score_with_value(0.1));
    index.insert(make_embedding_record("aaa", {4.0, 0.0}), score_with_value(0.9));
    auto result = index.query_nearest(std::vector<double>{1.0, 0.0});
    REQUIRE(result.has_value());
    CHECK(result->content_id == "aaa");
}

TEST_CASE("query agrees with the exhaustive scan oracle on random instances") {
    std::mt19937 rng(101);
    std::uniform_int_distribution<std::size_t> dim_dist(1, 16);
    std::uniform_int_distribution<std::size_t> size_dist(1, 100);
    std::uniform_real_distribution<double> value_dist(-1.0, 1.0);
    std::uniform_real_distribution<double> tau_dist(-1.0, 1.0);
    for (int trial = 0; trial < 300; ++trial) {
        std::size_t dim = dim_dist(rng);
        std::size_t size = size_dist(rng);
        double tau = tau_dist(rng);
        NeighborIndex index(tau);
        std::vector<EmbeddingRecord> records;
        for (std::size_t i = 0; i < size; ++i) {
            std::vector<double> vector(dim);
            double norm = 0.0;
            do {
                norm = 0.0;
                for (double& x : vector) {
                    x = value_dist(rng);
                    norm += x * x;
                }
            } while (norm == 0.0);
            EmbeddingRecord record = make_embedding_record("id" + std::to_string(i), vector);
            records.push_back(record);
            index.insert(record, score_with_value(0.5));
        }
        std::vector<double> query(dim);
        double norm = 0.0;
        do {
            norm = 0.0;
            for (double& x : query) {
                x = value_dist(rng);
                norm += x * x;
            }
        } while (norm == 0.0);
        auto via_index = index.query_nearest(query);
        auto via_scan = exhaustive_scan(records, query, tau);
        REQUIRE(via_index.has_value() == via_scan.has_value());
        if (via_index) {
            CHECK(via_index->content_id == via_scan->content_id);
            CHECK(via_index->similarity == via_scan->similarity);
        }
    }
}

TEST_CASE("similarities are invariant under positive scaling of the query") {
    std::mt19937 rng(113);
    std::uniform_real_distribution<double> value_dist(-1.0, 1.0);
    std::uniform_real_distribution<double> scale_dist(0.001, 1000.0);
    NeighborIndex index(-1.0);
    for (int i = 0; i < 20; ++i) {
        std::vector<double> vector = {value_dist(rng), value_dist(rng), value_dist(rng) + 2.0};
        index.insert(make_embedding_record("id" + std::to_string(i), vector),
                     score_with_value(0.5));
    }
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> query = {value_dist(rng), value_dist(rng), value_dist(rng) + 2.0};
        auto base = index.query_nearest(query);
        double scale = scale_dist(rng);
        std::vector<double> scaled = query;
        for (double& x : scaled) x *= scale;
        auto scaled_result = index.query_nearest(scaled);
        REQUIRE(base.has_value());
        REQUIRE(scaled_result.has_value());
        CHECK(base->content_id == scaled_result->content_id);
        CHECK_THAT(scaled_result->similarity,
                   Catch::Matchers::WithinAbs(base->similarity, 1e-12));
    }
}

TEST_CASE("raising tau never changes the neighbor identity, only its presence") {
    std::mt19937 rng(127);
    std::uniform_real_distribution<double> value_dist(-1.0, 1.0);
    std::vector<EmbeddingRecord> records;
    for (int i = 0; i < 30; ++i) {
        records.push_back(make_embedding_record(
            "id" + std::to_string(i), {value_dist(rng), value_dist(rng), value_dist(rng) + 1.5}));
    }
    std::vector<double> query = {0.2, -0.4, 1.0};
    std::optional<std::string> last_id;
    for (double tau : {-1.0, -0.5, 0.0, 0.5, 0.9, 0.99, 1.0}) {
        NeighborIndex index(tau);
        for (const EmbeddingRecord& record : records) index.insert(record, score_with_value(0.5));
        auto result = index.query_nearest(query);
        if (result) {
            if (last_id) CHECK(*last_id == result->content_id);
            last_id = result->content_id;
        }
    }
    REQUIRE(last_id.has_value());  // at least the permissive taus matched
}

TEST_CASE("embedding files load and validate") {
    std::string good = R"({"content_id":"a","vector":[1.0,2.0]})"
                       "\n"
                       R"({"content_id":"b","vector":[0.5,-0.5]})";
    std::vector<EmbeddingRecord> records = load_embedding_records(good);
    REQUIRE(records.size() == 2);
    CHECK(records[0].content_id == "a");

    CHECK_THROWS_AS(load_embedding_records(R"({"content_id":"a","vector":[0.0]})"),
                    ZeroVectorError);
    CHECK_THROWS_AS(load_embedding_records(R"({"content_id":"a"})"), ParseError);
    std::string mismatched = R"({"content_id":"a","vector":[1.0,2.0]})"
                             "\n"
                             R"({"content_id":"b","vector":[1.0]})";
    CHECK_THROWS_AS(load_embedding_records(mismatched), DimensionError);
}

TEST_CASE("index records join embeddings with scores and round-trip") {
    std::vector<EmbeddingRecord> embeddings = {make_embedding_record("a", {1.0, 0.0}),
                                               make_embedding_record("b", {0.0, 1.0})};
    std::vector<ScoreReportRecord> scores;
    scores.push_back(make_score_report("a", "testville", score_with_value(0.8)));
    scores.push_back(make_score_report("b", "testville", score_with_value(0.2)));
    scores.push_back(make_score_report("unused", "testville", score_with_value(0.5)));
    std::vector<IndexRecord> joined = join_embeddings_with_scores(embeddings, scores);
    REQUIRE(joined.size() == 2);

    std::string serialized = index_records_to_jsonl(joined);
    std::vector<IndexRecord> reloaded = index_records_from_jsonl(serialized);
    REQUIRE(reloaded.size() == 2);
    CHECK(reloaded[0].score.value == 0.8);
    CHECK(reloaded[0].embedding.vector == std::vector<double>{1.0, 0.0});

    NeighborIndex index = build_index(reloaded, 0.5);
    auto result = index.query_nearest(std::vector<double>{1.0, 0.0});
    REQUIRE(result.has_value());
    CHECK(result->score.value == 0.8);
}

TEST_CASE("join reports embeddings that have no score") {
    std::vector<EmbeddingRecord> embeddings = {make_embedding_record("lonely", {1.0})};
    std::vector<ScoreReportRecord> scores;
    try {
        join_embeddings_with_scores(embeddings, scores);
        FAIL("expected JoinError");
    } catch (const JoinError& e) {
        CHECK(std::string(e.what()).find("lonely") != std::string::npos);
    }
}
