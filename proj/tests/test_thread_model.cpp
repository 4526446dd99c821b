#include <algorithm>
#include <random>

#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"
#include "ponos/thread_model.hpp"

using namespace ponos;

TEST_CASE("map_assessor_label covers the whole label domain") {
    CHECK(map_assessor_label(AssessorLabel::condemnation_comment) == SentimentPolarity::negative);
    CHECK(map_assessor_label(AssessorLabel::approval_comment) == SentimentPolarity::positive);
    CHECK(map_assessor_label(AssessorLabel::approval_subject) == SentimentPolarity::positive);
    // Shared disdain toward the subject counts as agreement with the comment.
    CHECK(map_assessor_label(AssessorLabel::condemnation_subject) == SentimentPolarity::positive);
    CHECK(map_assessor_label(AssessorLabel::neutral) == SentimentPolarity::neutral);
}

TEST_CASE("aggregate_assessor_labels takes the majority") {
    std::vector<AssessorLabel> labels = {AssessorLabel::condemnation_comment,
                                         AssessorLabel::condemnation_comment,
                                         AssessorLabel::neutral};
    CHECK(aggregate_assessor_labels(labels) == SentimentPolarity::negative);
}

TEST_CASE("aggregate_assessor_labels single label is identity") {
    std::vector<AssessorLabel> labels = {AssessorLabel::neutral};
    CHECK(aggregate_assessor_labels(labels) == SentimentPolarity::neutral);
}

TEST_CASE("aggregate_assessor_labels ties resolve to neutral") {
    std::vector<AssessorLabel> labels = {AssessorLabel::condemnation_comment,
                                         AssessorLabel::approval_comment};
    CHECK(aggregate_assessor_labels(labels) == SentimentPolarity::neutral);
}

TEST_CASE("aggregate_assessor_labels rejects an empty list") {
    std::vector<AssessorLabel> labels;
    CHECK_THROWS_AS(aggregate_assessor_labels(labels), EmptyInputError);
}

TEST_CASE("aggregate_assessor_labels is permutation invariant") {
    std::mt19937 rng(7);
    std::uniform_int_distribution<int> label_dist(0, 4);
    std::uniform_int_distribution<int> size_dist(1, 11);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<AssessorLabel> labels;
        int n = size_dist(rng);
        for (int i = 0; i < n; ++i) labels.push_back(static_cast<AssessorLabel>(label_dist(rng)));
        SentimentPolarity expected = aggregate_assessor_labels(labels);
        std::shuffle(labels.begin(), labels.end(), rng);
        CHECK(aggregate_assessor_labels(labels) == expected);
    }
}

TEST_CASE("assessor label strings round-trip") {
    for (AssessorLabel label :
         {AssessorLabel::approval_comment, AssessorLabel::approval_subject, AssessorLabel::neutral,
          AssessorLabel::condemnation_comment, AssessorLabel::condemnation_subject}) {
        CHECK(assessor_label_from_string(to_string(label)) == label);
    }
    CHECK_THROWS_AS(assessor_label_from_string("approval"), ParseError);
}

TEST_CASE("content item invariants") {
    CHECK_NOTHROW(validate(test::post("p1")));
    CHECK_NOTHROW(validate(test::comment("c1", "p1")));

    ContentItem bad_post = test::post("p1");
    bad_post.parent_id = "x";
    CHECK_THROWS_AS(validate(bad_post), InvalidArgumentError);

    ContentItem bad_comment = test::comment("c1", "p1");
    bad_comment.parent_id.reset();
    CHECK_THROWS_AS(validate(bad_comment), InvalidArgumentError);

    ContentItem negative_time = test::post("p1");
    negative_time.created_at = -1;
    CHECK_THROWS_AS(validate(negative_time), InvalidArgumentError);

    ContentItem empty_context = test::post("p1");
    empty_context.context.community_id = "";
    CHECK_THROWS_AS(validate(empty_context), InvalidArgumentError);
}
