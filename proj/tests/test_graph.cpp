#include "mlcd/error.hpp"
#include "mlcd/graph.hpp"
#include "mlcd/modularity.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <sstream>

using namespace mlcd;
using testutil::graph_t1;
using testutil::make_graph;

TEST_CASE("graph totals and degrees") {
  const auto g = graph_t1();
  CHECK(g.n_nodes() == 4);
  CHECK(g.n_layers() == 2);
  CHECK(g.layer_totals()(0) == 6.0);
  CHECK(g.layer_totals()(1) == 4.0);
  CHECK(g.grand_total() == 10.0);
  CHECK(g.degrees()(0, 0) == 2.0);
  CHECK(g.degrees()(3, 1) == 1.0);
  for (Index m = 0; m < g.n_layers(); ++m) {
    CHECK(g.degrees().col(m).sum() == g.layer_totals()(m));
  }
}

TEST_CASE("self-loops count twice") {
  const auto g = make_graph(2, 1, {{0, 0, 0, 1.5}, {0, 0, 1, 1.0}});
  CHECK(g.degrees()(0, 0) == 4.0);
  CHECK(g.layer_totals()(0) == 5.0);
  const CommunityStats s(g, Partition({0, 0}, 1));
  CHECK(s.between(0)(0, 0) == 5.0);
}

TEST_CASE("invalid weights and shapes are rejected") {
  CHECK_THROWS_AS(make_graph(2, 1, {{0, 0, 1, -1.0}}), InputError);
  CHECK_THROWS_AS(make_graph(2, 1, {{0, 0, 1, std::nan("")}}), InputError);
  CHECK_THROWS_AS(make_graph(2, 1, {{0, 0, 2, 1.0}}), InputError);
  SparseLayer asym(2, 2);
  asym.insert(0, 1) = 1.0;
  CHECK_THROWS_AS(MultiLayerGraph({asym}), InputError);
}

TEST_CASE("partition validation and compaction") {
  CHECK_THROWS_AS(Partition({0, 2}, 2), InputError);
  CHECK_THROWS_AS(Partition({0, -1}, 2), InputError);
  const Partition z({2, 2, 0, 3}, 4);
  const Partition c = z.compacted();
  CHECK(c.k == 3);
  CHECK(c.labels == std::vector<int>{0, 0, 1, 2});
  CHECK(z.count_nonempty() == 3);
}

TEST_CASE("init_stats on T1") {
  const auto g = graph_t1();
  const CommunityStats s(g, Partition({0, 0, 1, 1}, 2));
  CHECK(s.between(0)(0, 0) == 2.0);
  CHECK(s.between(0)(1, 1) == 2.0);
  CHECK(s.between(0)(0, 1) == 1.0);
  CHECK(s.community_degrees()(0, 0) == 3.0);
  CHECK(s.between(1)(0, 0) == 2.0);
  CHECK(s.between(1)(0, 1) == 0.0);
  CHECK(s.community_degrees()(0, 1) == 2.0);

  const CommunityStats one(g, Partition::single_block(4));
  CHECK(one.between(0)(0, 0) == g.layer_totals()(0));
  const CommunityStats singles(g, Partition::singletons(4));
  CHECK(singles.between(0).diagonal().isZero());
}

TEST_CASE("apply_move on T1") {
  const auto g = graph_t1();
  CommunityStats s(g, Partition({0, 0, 1, 1}, 2));
  s.apply_move(g, 1, 0, 1);
  CHECK(s.between(0)(0, 0) == 0.0);
  CHECK(s.between(0)(0, 1) == 2.0);
  CHECK(s.between(0)(1, 1) == 2.0);
  CHECK_THROWS_AS(s.apply_move(g, 1, 0, 1), InputError);
  CHECK_THROWS_AS(s.apply_move(g, 1, 1, 5), InputError);
}

TEST_CASE("apply_move matches init_stats on random instances") {
  Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    std::uniform_int_distribution<Index> size(2, 50);
    const Index n = size(rng);
    const Index m = 1 + trial % 3;
    const int k = 1 + trial % 6;
    const auto g = testutil::random_graph(rng, n, m, 0.2);
    auto labels = testutil::random_labels(rng, n, k + 1);
    CommunityStats s(g, Partition(labels, k + 1));
    std::uniform_int_distribution<Index> node(0, n - 1);
    std::uniform_int_distribution<int> comm(0, k);
    const Index i = node(rng);
    const int from = labels[std::size_t(i)];
    int to = comm(rng);
    if (to == from) to = (to + 1) % (k + 1);
    const CommunityStats before = s;
    s.apply_move(g, i, from, to);
    labels[std::size_t(i)] = to;
    const CommunityStats fresh(g, Partition(labels, k + 1));
    for (Index layer = 0; layer < m; ++layer) {
      CHECK((s.between(layer) - fresh.between(layer)).cwiseAbs().maxCoeff() <= 1e-9);
      CHECK(s.between(layer).rowwise().sum().isApprox(s.community_degrees().col(layer)));
    }
    CHECK((s.community_degrees() - fresh.community_degrees()).cwiseAbs().maxCoeff() <= 1e-9);
    s.apply_move(g, i, to, from);
    for (Index layer = 0; layer < m; ++layer) CHECK(s.between(layer) == before.between(layer));
  }
}

TEST_CASE("accumulators match the defining sums") {
  Rng rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    const auto g = testutil::random_graph(rng, 9, 2, 0.4);
    const auto z = testutil::random_labels(rng, 9, 3);
    const CommunityStats s(g, Partition(z, 3));
    const auto dense = oracle::dense_layers(g);
    for (Index m = 0; m < 2; ++m) {
      for (int q = 0; q < 3; ++q) {
        CHECK(s.community_degrees()(q, m) == doctest::Approx(oracle::e_degree(dense[std::size_t(m)], z, q)));
        for (int l = 0; l < 3; ++l) {
          CHECK(s.between(m)(q, l) == doctest::Approx(oracle::e_between(dense[std::size_t(m)], z, q, l)));
        }
      }
      CHECK(s.community_degrees().col(m).sum() == doctest::Approx(g.layer_totals()(m)));
    }
  }
}

TEST_CASE("contraction preserves every measure") {
  Rng rng(17);
  for (int trial = 0; trial < 40; ++trial) {
    const auto g = testutil::random_graph(rng, 20, 1 + trial % 3, 0.25);
    const Partition z = Partition::from_labels(testutil::random_labels(rng, 20, 5));
    const auto coarse = contract(g, z);
    CHECK(coarse.n_nodes() == z.count_nonempty());
    for (Index m = 0; m < g.n_layers(); ++m) CHECK(coarse.layer_totals()(m) == doctest::Approx(g.layer_totals()(m)));
    const CommunityStats fine(g, z);
    const CommunityStats coarse_stats(coarse, Partition::singletons(coarse.n_nodes()));
    for (MeasureKind kind : kAllMeasures) {
      CHECK(evaluate(kind, coarse_stats) == doctest::Approx(evaluate(kind, fine)).epsilon(1e-12));
    }
  }
}

TEST_CASE("aggregate layers") {
  const auto agg = aggregate_layers(graph_t1());
  CHECK(agg.n_layers() == 1);
  CHECK(agg.layer_totals()(0) == 10.0);
  CHECK(agg.weight(0, 0, 1) == 2.0);
  CHECK(agg.weight(0, 2, 3) == 2.0);
  CHECK(agg.weight(0, 0, 2) == 1.0);
  const auto single = make_graph(3, 1, {{0, 0, 1, 1.0}, {0, 1, 2, 2.0}});
  CHECK(aggregate_layers(single).degrees() == single.degrees());
}

TEST_CASE("restrictions") {
  const auto g = make_graph(4, 2, {{0, 0, 1, 1.0}, {0, 2, 3, 1.0}, {1, 0, 1, 1.0}});
  const auto r = restrict_to_cross_layer_connected(g);
  CHECK(r.graph.n_nodes() == 2);
  CHECK(r.removed_ids == std::vector<std::string>{"2", "3"});
  const auto again = restrict_to_cross_layer_connected(r.graph);
  CHECK(again.graph.n_nodes() == 2);
  CHECK(again.removed_ids.empty());

  const auto full = restrict_to_cross_layer_connected(graph_t1());
  CHECK(full.graph.n_nodes() == 4);
  const auto active = restrict_to_active_nodes(make_graph(3, 1, {{0, 0, 1, 1.0}}));
  CHECK(active.kept == std::vector<Index>{0, 1});
  CHECK_THROWS_AS(restrict_to_cross_layer_connected(make_graph(2, 2, {{0, 0, 1, 1.0}})), PreconditionError);
}

TEST_CASE("edge list parsing") {
  std::istringstream in("# comment\nL1 a b\nL1 c d\nL1 a c\n\nL2 a b\nL2 c d\n");
  const auto g = load_multilayer_edgelist(in);
  CHECK(g.n_nodes() == 4);
  CHECK(g.n_layers() == 2);
  CHECK(g.layer_totals()(0) / 2 == 3.0);
  CHECK(g.layer_totals()(1) / 2 == 2.0);
  CHECK(g.layer_names() == std::vector<std::string>{"L1", "L2"});

  std::istringstream weighted("L1 a b 2.5\n");
  const auto w = load_multilayer_edgelist(weighted);
  CHECK(w.weight(0, 0, 1) == 2.5);
  CHECK(w.degrees()(0, 0) == 2.5);
}

TEST_CASE("duplicate policies") {
  const std::string text = "L1 a b 1\nL1 b a 3\n";
  auto load = [&](DuplicatePolicy p) {
    std::istringstream in(text);
    return load_multilayer_edgelist(in, {p}).weight(0, 0, 1);
  };
  CHECK(load(DuplicatePolicy::SumHalved) == 2.0);
  CHECK(load(DuplicatePolicy::Sum) == 4.0);
  CHECK(load(DuplicatePolicy::Max) == 3.0);
  std::istringstream doubled("L1 a b\nL1 b a\n");
  CHECK(load_multilayer_edgelist(doubled).weight(0, 0, 1) == 1.0);
  CHECK(parse_duplicate_policy("max") == DuplicatePolicy::Max);
  CHECK_THROWS_AS(parse_duplicate_policy("mean"), InputError);
}

TEST_CASE("edge list errors") {
  auto fails = [](const std::string& text) {
    std::istringstream in(text);
    return load_multilayer_edgelist(in);
  };
  CHECK_THROWS_AS(fails("L1 a b -1\n"), InputError);
  CHECK_THROWS_AS(fails("L1 a b x\n"), InputError);
  CHECK_THROWS_AS(fails("L1 a\n"), InputError);
  CHECK_THROWS_AS(fails("# nothing\n"), InputError);
  try {
    fails("L1 a b\nL1 a b c d e\n");
    FAIL("expected an error");
  } catch (const InputError& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
}

TEST_CASE("edge list round trip") {
  Rng rng(3);
  const auto g = testutil::random_graph(rng, 30, 3, 0.2, 5);
  // nodes reappear in first-seen order, so degrees are compared by node id
  auto by_id = [](const MultiLayerGraph& h) {
    std::map<std::pair<std::string, Index>, double> out;
    for (Index i = 0; i < h.n_nodes(); ++i) {
      for (Index m = 0; m < h.n_layers(); ++m) {
        if (h.degrees()(i, m) > 0) out[{h.node_ids()[std::size_t(i)], m}] = h.degrees()(i, m);
      }
    }
    return out;
  };
  std::stringstream buffer;
  write_multilayer_edgelist(buffer, g);
  const auto back = load_multilayer_edgelist(buffer);
  CHECK(back.layer_totals() == g.layer_totals());
  CHECK(back.grand_total() == g.grand_total());
  CHECK(by_id(back) == by_id(g));

  std::stringstream again;
  write_multilayer_edgelist(again, back);
  const auto third = load_multilayer_edgelist(again);
  CHECK(by_id(third) == by_id(g));
}

TEST_CASE("partition files") {
  const auto g = graph_t1();
  std::stringstream buffer;
  write_partition(buffer, g, Partition({0, 0, 1, 1}, 2));
  const auto labeled = read_partition(buffer);
  CHECK(labeled.communities == std::vector<int>{1, 1, 2, 2});
  const auto z = partition_for_graph(g, labeled);
  CHECK(z.labels == std::vector<int>{0, 0, 1, 1});
  std::istringstream missing("0 1\n1 1\n");
  CHECK_THROWS_AS(partition_for_graph(g, read_partition(missing)), InputError);
  std::istringstream bad("0 zero\n");
  CHECK_THROWS_AS(read_partition(bad), InputError);
}
