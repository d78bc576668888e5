#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "cmdp/config.hpp"
#include "cmdp/envs.hpp"
#include "cmdp/errors.hpp"
#include "cmdp/policy_io.hpp"

using namespace cmdp;
using nlohmann::json;

TEST_CASE("policy files round trip exactly") {
  const MarkovPolicy p(2, 2, 3, {0.1, 0.2, 0.7, 1, 0, 0, 0.3333333333333333, 0.3333333333333333, 0.3333333333333334,
                                 0, 0.5, 0.5});
  std::stringstream s;
  write_policy(s, p, {"note"});
  const MarkovPolicy q = read_policy(s);
  CHECK(q.probs() == p.probs());
}

TEST_CASE("policy parser rejects malformed files") {
  auto parse = [](const std::string& text) {
    std::istringstream in(text);
    return read_policy(in);
  };
  CHECK_THROWS_AS(parse(""), ParseError);
  CHECK_THROWS_AS(parse("1 1 2\n"), ParseError);
  CHECK_THROWS_AS(parse("1 1 2\n0 0 0.5\n"), ParseError);
  CHECK_THROWS_AS(parse("1 2 2\n0 0 1 0\n0 0 1 0\n"), ParseError);
  CHECK_THROWS_AS(parse("1 1 2\n0 5 1 0\n"), ParseError);
  CHECK_THROWS_AS(parse("1 1 2\n0 0 0.9 0.9\n"), ParseError);
  CHECK(parse("# c\n1 1 2\n# c\n0 0 0.25 0.75\n").prob(0, 0, 1) == doctest::Approx(0.75));
}

TEST_CASE("CMDP documents round trip") {
  const TabularCmdp m = synthetic_cmdp();
  const TabularCmdp back = cmdp_from_json(cmdp_to_json(m));
  CHECK(back.tables().transitions == m.tables().transitions);
  CHECK(back.tables().utilities == m.tables().utilities);
  CHECK(back.threshold(0) == m.threshold(0));
}

TEST_CASE("CMDP parser names the offending field") {
  json doc = cmdp_to_json(toy_cmdp());
  doc.erase("rho");
  CHECK_THROWS_WITH_AS(cmdp_from_json(doc), doctest::Contains("rho"), ParseError);

  doc = cmdp_to_json(toy_cmdp());
  doc["r"][0][0] = json::array({1.0});
  CHECK_THROWS_WITH_AS(cmdp_from_json(doc), doctest::Contains("r"), ParseError);

  doc = cmdp_to_json(toy_cmdp());
  doc["P"][0][0][1] = json::array({"x"});
  CHECK_THROWS_AS(cmdp_from_json(doc), ParseError);
}

TEST_CASE("transition rows are renormalized only on request") {
  json doc = cmdp_to_json(synthetic_cmdp());
  doc["P"][0][0][0] = json::array({0.5, 0.5, 0.2});
  CHECK_THROWS_AS(cmdp_from_json(doc), ParseError);
  const TabularCmdp m = cmdp_from_json(doc, true);
  CHECK(m.transition(0, 0, 0, 2) == doctest::Approx(0.2 / 1.2));
  doc["renormalize"] = true;
  CHECK_NOTHROW(cmdp_from_json(doc));
  doc["P"][0][0][0] = json::array({5.0, 0.0, 0.0});
  CHECK_THROWS_AS(cmdp_from_json(doc), ParseError);
}

TEST_CASE("bundled synthetic document needs renormalization") {
  json doc = synthetic_cmdp_json();
  CHECK(doc.at("renormalize") == true);
  const TabularCmdp m = cmdp_from_json(doc);
  doc.erase("renormalize");
  CHECK_THROWS_AS(cmdp_from_json(doc), ParseError);
  CHECK(m.tables().transitions == synthetic_cmdp().tables().transitions);
}

TEST_CASE("config rejects unknown keys and bad ranges") {
  CHECK_THROWS_AS(config_from_json(json::parse(R"({"Kk": 10})")), ConfigError);
  CHECK_THROWS_AS(config_from_json(json::parse(R"({"instance": {"kind": "toy", "size": 3}})")), ConfigError);
  CHECK_THROWS_AS(config_from_json(json::parse(R"({"triple_q": {"bonus": 1}})")), ConfigError);
  CHECK_THROWS_AS(config_from_json(json::parse(R"({"K": 10.5})")), ConfigError);
  CHECK_THROWS_AS(config_from_json(json::parse(R"({"K": "many"})")), ConfigError);

  auto invalid = [](const char* text) {
    return [text] { validate_config(config_from_json(json::parse(text))); };
  };
  CHECK_THROWS_AS(invalid(R"({"eps": 0})")(), ConfigError);
  CHECK_THROWS_AS(invalid(R"({"algorithm": "ppo"})")(), ConfigError);
  CHECK_THROWS_AS(invalid(R"({"instance": {"kind": "file"}})")(), ConfigError);
  CHECK_THROWS_AS(invalid(R"({"K": 2})")(), ConfigError);
  CHECK_NOTHROW(invalid(R"({"instance": {"kind": "toy"}, "K": 100})")());
}

TEST_CASE("config survives a round trip") {
  const ExperimentConfig cfg = config_from_json(json::parse(
      R"({"name": "x", "instance": {"kind": "grid"}, "K": 5000, "eps": 0.2, "seeds": [4, 5],
          "triple_q": {"bonus_scale": 0.1}, "multi_prune": true})"));
  CHECK(cfg.instance.H == 6);
  const ExperimentConfig back = config_from_json(config_to_json(cfg));
  CHECK(back.pri.K == 5000);
  CHECK(back.pri.eps == 0.2);
  CHECK(back.pri.multi_prune);
  CHECK(back.pri.triple_q.bonus_scale == 0.1);
  CHECK(back.seeds == std::vector<std::uint64_t>{4, 5});
}

TEST_CASE("schedule length adds the three phases") {
  PriParams p;
  p.K = 10000;
  CHECK(pri_schedule_length(p) == 100 + 100 * 100 + 100 * 100);
  p.identify = false;
  p.prune_episodes = 7;
  CHECK(pri_schedule_length(p) == 7 + 100 * 100);
}
