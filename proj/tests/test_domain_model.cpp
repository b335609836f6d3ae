#include <doctest.h>

#include <random>

#include "support/random_instances.hpp"
#include "xsni/domain_tree.hpp"

using namespace xsni;

namespace {

const std::filesystem::path kFixtures = XSNI_FIXTURE_DIR;

DomainTree google_fixture() {
  return DomainTree::from_file(kFixtures / "google" / "google.com.json");
}

} // namespace

TEST_CASE("hostnames canonicalize to lowercase") {
  Hostname h("WWW.Example.COM");
  CHECK(h.str() == "www.example.com");
  CHECK(h == Hostname("www.EXAMPLE.com"));
  CHECK(h.label_count() == 3);
}

TEST_CASE("hostname validation rejects malformed names") {
  CHECK_THROWS_AS(Hostname(""), ParseError);
  CHECK_THROWS_AS(Hostname(".example.com"), ParseError);
  CHECK_THROWS_AS(Hostname("example.com."), ParseError);
  CHECK_THROWS_AS(Hostname("a..b"), ParseError);
  CHECK_THROWS_AS(Hostname("exa mple.com"), ParseError);
  CHECK_THROWS_AS(Hostname(std::string(64, 'a') + ".com"), ParseError); // label > 63
  CHECK_THROWS_AS(Hostname(std::string(254, 'a')), ParseError);         // name > 253
  CHECK_FALSE(Hostname::try_parse("bad\x80name").has_value());
  CHECK(Hostname::try_parse("ok.example").has_value());
}

TEST_CASE("google fixture has the expected shape") {
  DomainTree tree = google_fixture();
  CHECK(tree.nodes().size() == 8);
  CHECK(tree.distinct_tls_hostnames() == 8);
  CHECK(tree.depth(Hostname("google.com")) == 1);
  CHECK(tree.depth(Hostname("www.gstatic.com")) == 3);
  CHECK(tree.depth(Hostname("apis.google.com")) == 4);
  CHECK(tree.longest_path() == 4);
}

TEST_CASE("single-node tree") {
  DomainTree tree = DomainTree::from_json(
      {{"root", "a.example"},
       {"nodes", {{{"host", "a.example"}, {"parent", nullptr}, {"tls", true}}}}});
  CHECK(tree.nodes().size() == 1);
  CHECK(tree.depth(tree.root()) == 1);
  CHECK(tree.longest_path() == 1);
}

TEST_CASE("cycles are rejected") {
  nlohmann::json doc{{"root", "r.example"},
                     {"nodes",
                      {{{"host", "r.example"}, {"parent", nullptr}, {"tls", true}},
                       {{"host", "a.example"}, {"parent", "b.example"}, {"tls", true}},
                       {{"host", "b.example"}, {"parent", "a.example"}, {"tls", true}}}}};
  CHECK_THROWS_AS(DomainTree::from_json(doc), ValidationError);
}

TEST_CASE("duplicate hostnames are an error, not first-parent-wins") {
  nlohmann::json doc{{"root", "r.example"},
                     {"nodes",
                      {{{"host", "r.example"}, {"parent", nullptr}, {"tls", true}},
                       {{"host", "a.example"}, {"parent", "r.example"}, {"tls", true}},
                       {{"host", "b.example"}, {"parent", "r.example"}, {"tls", true}},
                       {{"host", "a.example"}, {"parent", "b.example"}, {"tls", true}}}}};
  CHECK_THROWS_AS(DomainTree::from_json(doc), ValidationError);
}

TEST_CASE("schema violations are rejected") {
  CHECK_THROWS_AS(DomainTree::from_json(nlohmann::json::array()), ParseError);
  CHECK_THROWS_AS(DomainTree::from_json({{"root", "a.example"}}), ParseError);
  // root with a parent
  CHECK_THROWS_AS(
      DomainTree::from_json(
          {{"root", "a.example"},
           {"nodes", {{{"host", "a.example"}, {"parent", "a.example"}, {"tls", true}}}}}),
      ValidationError);
  // unknown parent
  CHECK_THROWS_AS(
      DomainTree::from_json(
          {{"root", "a.example"},
           {"nodes",
            {{{"host", "a.example"}, {"parent", nullptr}, {"tls", true}},
             {{"host", "b.example"}, {"parent", "ghost.example"}, {"tls", true}}}}}),
      ValidationError);
  // root missing from the node list
  CHECK_THROWS_AS(
      DomainTree::from_json(
          {{"root", "a.example"},
           {"nodes", {{{"host", "b.example"}, {"parent", nullptr}, {"tls", true}}}}}),
      ValidationError);
}

TEST_CASE("unknown node lookups throw") {
  DomainTree tree = google_fixture();
  CHECK_THROWS_AS(tree.depth(Hostname("nope.example")), ValidationError);
  CHECK_THROWS_AS(tree.node(Hostname("nope.example")), ValidationError);
}

TEST_CASE("star tree longest path is 2") {
  std::vector<TreeNode> nodes;
  nodes.push_back({Hostname("root.example"), std::nullopt, true, std::nullopt});
  for (int i = 0; i < 30; ++i) {
    nodes.push_back({Hostname("c" + std::to_string(i) + ".example"), Hostname("root.example"),
                     true, std::nullopt});
  }
  DomainTree tree(Hostname("root.example"), std::move(nodes));
  // brute force over every root-to-node chain
  int longest = 0;
  for (const auto& [host, node] : tree.nodes()) {
    longest = std::max(longest, static_cast<int>(tree.path_from_root(host).size()));
  }
  CHECK(longest == 2);
  CHECK(tree.longest_path() == 2);
}

TEST_CASE("non-TLS nodes count for depth but not for handshakes") {
  DomainTree tree = DomainTree::from_file(kFixtures / "corpus10" / "eta.example.json");
  CHECK(tree.distinct_tls_hostnames() == 4);
  CHECK(tree.depth(Hostname("deep.eta.example")) == 4); // through the non-TLS hop
  CHECK(tree.longest_path() == 4);

  DomainTree singleton = DomainTree::from_json(
      {{"root", "plain.example"},
       {"nodes", {{{"host", "plain.example"}, {"parent", nullptr}, {"tls", false}}}}});
  CHECK(singleton.distinct_tls_hostnames() == 0);
  CHECK(singleton.longest_path() == 1);
}

TEST_CASE("parse -> serialize -> parse is identity on canonical form") {
  std::mt19937 rng(411);
  auto pool = testgen::name_pool(12, "roundtrip");
  for (int i = 0; i < 50; ++i) {
    DomainTree tree = testgen::random_tree(rng, pool, 12);
    DomainTree reparsed = DomainTree::from_json(tree.to_json());
    CHECK(reparsed.to_json() == tree.to_json());
  }
  // and on a fixture that carries certificates
  DomainTree alpha = DomainTree::from_file(kFixtures / "corpus10" / "alpha.example.json");
  CHECK(DomainTree::from_json(alpha.to_json()).to_json() == alpha.to_json());
}

TEST_CASE("node depth is within 1..|nodes| on random trees") {
  std::mt19937 rng(412);
  auto pool = testgen::name_pool(12, "depth");
  for (int i = 0; i < 200; ++i) {
    DomainTree tree = testgen::random_tree(rng, pool, 12);
    int max_depth = 0;
    int tls_count = 0;
    for (const auto& [host, node] : tree.nodes()) {
      int d = tree.depth(host);
      CHECK(d >= 1);
      CHECK(d <= static_cast<int>(tree.nodes().size()));
      if (node.tls) {
        max_depth = std::max(max_depth, d);
        ++tls_count;
      }
    }
    CHECK(tree.longest_path() == std::max(1, max_depth));
    CHECK(tree.distinct_tls_hostnames() == tls_count);
  }
}

TEST_CASE("corpus loading sorts by root and rejects duplicates") {
  auto corpus = load_corpus(kFixtures / "corpus10");
  CHECK(corpus.size() == 10);
  CHECK(std::is_sorted(corpus.begin(), corpus.end(), [](const auto& a, const auto& b) {
    return a.root() < b.root();
  }));
  CHECK_THROWS_AS(load_corpus(kFixtures / "does-not-exist"), ParseError);

  auto empty = std::filesystem::temp_directory_path() / "xsni_empty_corpus";
  std::filesystem::remove_all(empty);
  std::filesystem::create_directories(empty);
  CHECK_THROWS_AS(load_corpus(empty), ParseError);
}
