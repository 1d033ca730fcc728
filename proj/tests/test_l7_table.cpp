#include "doctest.h"

#include "nfmeter/errors.hpp"
#include "nfmeter/l7_table.hpp"

using namespace nfmeter;

namespace {

FlowKey key(std::uint8_t proto, std::uint16_t cport, std::uint16_t sport) {
  return {Ipv4Addr(1, 1, 1, 1), Ipv4Addr(2, 2, 2, 2), cport, sport, proto};
}

} // namespace

TEST_CASE("default table ids") {
  const auto table = L7Table::defaults();
  CHECK(classify_l7(key(ipproto::kUdp, 53001, 53), table) == 5);
  CHECK(classify_l7(key(ipproto::kTcp, 51000, 80), table) == 7);
  CHECK(classify_l7(key(ipproto::kTcp, 40000, 21), table) == 1);
  CHECK(classify_l7(key(ipproto::kTcp, 40000, 443), table) == 91);
  CHECK(classify_l7(key(ipproto::kTcp, 40000, 22), table) == 92);
  CHECK(classify_l7(key(ipproto::kTcp, 40000, 23), table) == 70);
  CHECK(classify_l7(key(ipproto::kTcp, 40000, 25), table) == 3);
  CHECK(classify_l7(key(ipproto::kTcp, 40000, 50000), table) == 0);
  // protocol matters: UDP/80 is not HTTP
  CHECK(classify_l7(key(ipproto::kUdp, 40000, 80), table) == 0);
  // orientation does not
  CHECK(classify_l7(key(ipproto::kTcp, 80, 51000), table) == 7);
}

TEST_CASE("table file parsing") {
  const auto table = L7Table::parse("# custom\nudp,53,5\n\ntcp, 8080 ,7\n132,9,1\n");
  CHECK(table.size() == 3);
  CHECK(table.lookup(ipproto::kTcp, 8080) == 7);
  CHECK(table.lookup(132, 9) == 1);
  CHECK(table.lookup(ipproto::kTcp, 80) == 0);

  CHECK_THROWS_AS(L7Table::parse("sctp,1,2\n"), ParseError);
  CHECK_THROWS_AS(L7Table::parse("tcp,70000,2\n"), ParseError);
  CHECK_THROWS_AS(L7Table::parse("tcp,80\n"), ParseError);
  CHECK_THROWS_AS(L7Table::parse("tcp,80,7,9\n"), ParseError);
  CHECK_THROWS_AS(L7Table::parse("tcp,80,x\n"), ParseError);
}

TEST_CASE("shipped table file equals the defaults") {
  const auto loaded = L7Table::load(std::filesystem::path(NFMETER_DATA_DIR) / "l7_ports.csv");
  const auto builtin = L7Table::defaults();
  CHECK(loaded.size() == builtin.size());
  for (const std::uint8_t proto : {ipproto::kTcp, ipproto::kUdp}) {
    for (std::uint32_t port = 0; port < 65536; ++port) {
      CHECK(loaded.lookup(proto, static_cast<std::uint16_t>(port)) ==
            builtin.lookup(proto, static_cast<std::uint16_t>(port)));
    }
  }
}
