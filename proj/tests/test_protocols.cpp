#include "doctest.h"

#include "frames.hpp"
#include "nfmeter/protocols.hpp"

using namespace nfmeter;
using namespace nfmeter::testing;

TEST_CASE("DNS query id and type") {
  // id 0x1234, RD, one question "a.io" type A class IN
  const std::vector<std::uint8_t> query = {0x12, 0x34, 0x01, 0x00, 0x00, 0x01, 0x00, 0x00,
                                           0x00, 0x00, 0x00, 0x00, 0x01, 'a',  0x02, 'i',
                                           'o',  0x00, 0x00, 0x01, 0x00, 0x01};
  auto info = parse_dns(query);
  REQUIRE(info);
  CHECK_FALSE(info->is_response);
  CHECK(info->id == 4660);
  CHECK(info->query_type == 1);
  CHECK_FALSE(info->first_a_ttl);
}

TEST_CASE("DNS response: first A record TTL") {
  // answer name is a compression pointer to offset 12
  const std::vector<std::uint8_t> response = {
      0x12, 0x34, 0x81, 0x80, 0x00, 0x01, 0x00, 0x01, 0x00, 0x00, 0x00, 0x00,
      0x01, 'a',  0x02, 'i',  'o',  0x00, 0x00, 0x01, 0x00, 0x01,
      0xc0, 0x0c, 0x00, 0x01, 0x00, 0x01, 0x00, 0x00, 0x01, 0x2c, 0x00, 0x04, 1, 2, 3, 4};
  auto info = parse_dns(response);
  REQUIRE(info);
  CHECK(info->is_response);
  REQUIRE(info->first_a_ttl);
  CHECK(*info->first_a_ttl == 300);
}

TEST_CASE("DNS response: A record after a CNAME") {
  auto msg = dns_response(9, "www.example.org", 1,
                          {{5, 77, {3, 'c', 'd', 'n', 0}}, {1, 3600, {1, 1, 1, 1}}, {1, 5, {2, 2, 2, 2}}});
  auto info = parse_dns(msg);
  REQUIRE(info);
  REQUIRE(info->first_a_ttl);
  CHECK(*info->first_a_ttl == 3600);
}

TEST_CASE("DNS response with only AAAA answers has no A TTL") {
  auto msg = dns_response(9, "v6.example", 28, {{28, 120, std::vector<std::uint8_t>(16, 0)}});
  auto info = parse_dns(msg);
  REQUIRE(info);
  CHECK_FALSE(info->first_a_ttl);
}

TEST_CASE("malformed DNS payloads") {
  SUBCASE("short header") {
    const std::vector<std::uint8_t> b(11, 0);
    CHECK_FALSE(parse_dns(b));
  }
  SUBCASE("question runs off the end") {
    auto q = dns_query(1, "abc.def", 1);
    q.resize(q.size() - 3);
    CHECK_FALSE(parse_dns(q));
  }
  SUBCASE("self-referencing compression pointer") {
    std::vector<std::uint8_t> b = {0, 1, 0x81, 0x80, 0, 1, 0, 1, 0, 0, 0, 0,
                                   0xc0, 0x0c, 0, 1, 0, 1};
    CHECK_FALSE(parse_dns(b));
  }
  SUBCASE("pointer loop between two names") {
    auto msg = dns_response(3, "x.y", 1, {{1, 10, {1, 2, 3, 4}}});
    // make the question name point forward to the answer name, which points back
    msg[12] = 0xc0;
    msg[13] = static_cast<std::uint8_t>(12 + 9);
    CHECK_FALSE(parse_dns(msg));
  }
  SUBCASE("answer rdata length past the end") {
    auto msg = dns_response(3, "x.y", 1, {{1, 10, {1, 2, 3, 4}}});
    msg.resize(msg.size() - 2);
    CHECK_FALSE(parse_dns(msg));
  }
  SUBCASE("reserved label type") {
    std::vector<std::uint8_t> b = {0, 1, 0x01, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0x40, 0, 0, 1, 0, 1};
    CHECK_FALSE(parse_dns(b));
  }
}

TEST_CASE("FTP reply codes") {
  CHECK(parse_ftp_response(bytes_of("230 Login successful\r\n")) == 230);
  CHECK(parse_ftp_response(bytes_of("331-Password required\r\n")) == 331);
  CHECK_FALSE(parse_ftp_response(bytes_of("USER bob\r\n")));
  CHECK_FALSE(parse_ftp_response(bytes_of("23 short\r\n")));
  CHECK_FALSE(parse_ftp_response(bytes_of("2301 too many digits")));
  CHECK_FALSE(parse_ftp_response(bytes_of("230")));
  CHECK_FALSE(parse_ftp_response({}));
}
