#include "doctest.h"

#include "spaql/policy_table.hpp"

#include <sstream>

using namespace spaql;

namespace {

void force_split(PartitionTree& tree, std::int32_t leaf) {
    while (tree.node(leaf).visits < split_threshold(tree.node(leaf))) tree.record_visit(leaf);
    REQUIRE(tree.split_if_due(leaf));
}

PartitionTree grown_tree(const SpaceSpec& spec, std::uint64_t seed, int target) {
    PartitionTree tree(spec, 200.0);
    Rng rng(seed);
    while (tree.arm_count() < target) {
        auto leaves = tree.all_leaves();
        std::int32_t leaf = leaves[static_cast<std::size_t>(rng.uniform_int(static_cast<int>(leaves.size())))];
        tree.node_mut(leaf).q = rng.uniform(-5.0, 205.0);
        force_split(tree, leaf);
    }
    for (std::int32_t leaf : tree.all_leaves()) tree.node_mut(leaf).q = rng.uniform(-5.0, 205.0);
    return tree;
}

}  // namespace

TEST_CASE("fresh tree exports a single full-cube row") {
    PolicyTable t = to_policy_table(PartitionTree(pendulum_space(), 200.0));
    CHECK(t.action_kind == ActionKind::kContinuous);
    CHECK(t.state_dims == 3);
    REQUIRE(t.rows.size() == 1);
    const PolicyRow& r = t.rows[0];
    for (int j = 0; j < 3; ++j) {
        CHECK(r.state_lo[static_cast<std::size_t>(j)] == doctest::Approx(-1.0));
        CHECK(r.state_hi[static_cast<std::size_t>(j)] == doctest::Approx(1.0));
    }
    CHECK(r.action_lo == doctest::Approx(-1.0));
    CHECK(r.action_hi == doctest::Approx(1.0));
    CHECK(r.q == doctest::Approx(200.0));
    CHECK(r.visits == 0);
}

TEST_CASE("row count equals arm count") {
    PartitionTree tree = grown_tree(cartpole_space(), 5, 120);
    PolicyTable t = to_policy_table(tree);
    CHECK(static_cast<std::int64_t>(t.rows.size()) == tree.arm_count());
    // categorical rows carry explicit index sets
    for (const PolicyRow& r : t.rows) CHECK(!r.action_set.empty());
}

TEST_CASE("TSV header and shape") {
    PolicyTable t = to_policy_table(PartitionTree(cartpole_space(), 200.0));
    std::string tsv = policy_table_to_tsv(t);
    std::istringstream is(tsv);
    std::string header;
    std::getline(is, header);
    CHECK(header ==
          "dim0_lo\tdim0_hi\tdim1_lo\tdim1_hi\tdim2_lo\tdim2_hi\tdim3_lo\tdim3_hi\taction_set\tq\tvisits");
    std::string row;
    std::getline(is, row);
    CHECK(row == "-1\t1\t-1\t1\t-1\t1\t-1\t1\t0,1\t200\t0");
    CHECK(tsv.back() == '\n');

    PolicyTable p = to_policy_table(PartitionTree(pendulum_space(), 200.0));
    std::string ptsv = policy_table_to_tsv(p);
    CHECK(ptsv.rfind("dim0_lo\tdim0_hi\tdim1_lo\tdim1_hi\tdim2_lo\tdim2_hi\taction_lo\taction_hi\tq\tvisits\n",
                     0) == 0);
}

TEST_CASE("TSV round-trips bit-exactly through 9 significant digits") {
    for (const SpaceSpec& spec : {pendulum_space(), cartpole_space(), pendulum_discrete_space()}) {
        PartitionTree tree = grown_tree(spec, 99, 100);
        PolicyTable t = to_policy_table(tree);
        std::string tsv = policy_table_to_tsv(t);
        std::istringstream is(tsv);
        PolicyTable back = parse_policy_tsv(is);
        CHECK(back.action_kind == t.action_kind);
        CHECK(back.state_dims == t.state_dims);
        REQUIRE(back.rows.size() == t.rows.size());
        // re-serialization is byte-identical: %.9g is a fixed point of parse
        CHECK(policy_table_to_tsv(back) == tsv);
    }
}

TEST_CASE("greedy_row agrees with tree greedy selection") {
    for (const SpaceSpec& spec : {pendulum_space(), cartpole_space()}) {
        PartitionTree tree = grown_tree(spec, 7, 150);
        PolicyTable t = to_policy_table(tree);
        Rng rng(31);
        std::vector<std::int32_t> rel;
        for (int i = 0; i < 1000; ++i) {
            StateVec s;
            for (int j = 0; j < spec.state_dims(); ++j) s.push_back(rng.uniform(-1.0, 1.0));
            tree.relevant_leaves(s.span(), rel);
            std::int32_t leaf = select_greedy(tree, rel);
            int row = t.greedy_row(s.span());
            REQUIRE(row >= 0);
            CHECK(t.rows[static_cast<std::size_t>(row)].q == doctest::Approx(tree.node(leaf).q));
            // same cell, not merely same q
            double lo[kMaxStateDims], hi[kMaxStateDims];
            tree.state_bounds(leaf, lo, hi);
            for (int j = 0; j < spec.state_dims(); ++j) {
                CHECK(t.rows[static_cast<std::size_t>(row)].state_lo[static_cast<std::size_t>(j)] ==
                      doctest::Approx(lo[j]).epsilon(1e-12));
                CHECK(t.rows[static_cast<std::size_t>(row)].state_hi[static_cast<std::size_t>(j)] ==
                      doctest::Approx(hi[j]).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("greedy_row reports uncovered states") {
    PolicyTable t = to_policy_table(PartitionTree(pendulum_space(), 200.0));
    t.rows[0].state_hi[0] = 0.0;  // carve away half the cube
    StateVec inside{-0.5, 0.0, 0.0};
    StateVec outside{0.5, 0.0, 0.0};
    CHECK(t.greedy_row(inside.span()) == 0);
    CHECK(t.greedy_row(outside.span()) == -1);
}

TEST_CASE("parse rejects malformed tables") {
    auto parse = [](const std::string& s) {
        std::istringstream is(s);
        return parse_policy_tsv(is);
    };
    CHECK_THROWS(parse(""));
    CHECK_THROWS(parse("bogus\theader\n"));
    // wrong column count in the body
    CHECK_THROWS(parse("dim0_lo\tdim0_hi\taction_lo\taction_hi\tq\tvisits\n-1\t1\t-1\t1\t5\n"));
    // non-numeric field
    CHECK_THROWS(parse("dim0_lo\tdim0_hi\taction_lo\taction_hi\tq\tvisits\n-1\tx\t-1\t1\t5\t0\n"));
}

TEST_CASE("sample_row_action draws from the row cell") {
    PartitionTree tree(pendulum_space(), 200.0);
    PolicyTable t = to_policy_table(tree);
    Rng rng(55);
    double sum = 0.0;
    for (int i = 0; i < 100000; ++i) {
        Action a = sample_row_action(t, 0, rng);
        CHECK(a.value >= -1.0);
        CHECK(a.value < 1.0);
        sum += a.value;
    }
    CHECK(std::abs(sum / 100000.0) < 0.01);

    PolicyTable c = to_policy_table(PartitionTree(cartpole_space(), 200.0));
    int ones = 0;
    for (int i = 0; i < 100000; ++i) ones += sample_row_action(c, 0, rng).index;
    CHECK(std::abs(ones / 100000.0 - 0.5) < 0.01);
}

TEST_CASE("format_g9 gives 9 significant digits") {
    CHECK(format_g9(0.0) == "0");
    CHECK(format_g9(1.0) == "1");
    CHECK(format_g9(-1287.3125) == "-1287.3125");
    CHECK(format_g9(0.123456789123) == "0.123456789");
    CHECK(format_g9(198.53) == "198.53");
}
