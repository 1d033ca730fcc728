#include "nfmeter/l7_table.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <string>

#include "nfmeter/errors.hpp"

namespace nfmeter {

namespace {

template <typename T>
std::optional<T> parse_number(std::string_view s, T max) {
  unsigned long value = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || p != s.data() + s.size() || s.empty() || value > max) {
    return std::nullopt;
  }
  return static_cast<T>(value);
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

} // namespace

L7Table L7Table::defaults() {
  L7Table t;
  t.set(ipproto::kTcp, 21, l7::kFtpControl);
  t.set(ipproto::kTcp, 22, l7::kSsh);
  t.set(ipproto::kTcp, 23, l7::kTelnet);
  t.set(ipproto::kTcp, 25, l7::kSmtp);
  t.set(ipproto::kTcp, 587, l7::kSmtp);
  t.set(ipproto::kUdp, 53, l7::kDns);
  t.set(ipproto::kTcp, 53, l7::kDns);
  t.set(ipproto::kUdp, 67, l7::kDhcp);
  t.set(ipproto::kUdp, 68, l7::kDhcp);
  t.set(ipproto::kTcp, 80, l7::kHttp);
  t.set(ipproto::kTcp, 110, l7::kPop3);
  t.set(ipproto::kUdp, 123, l7::kNtp);
  t.set(ipproto::kTcp, 143, l7::kImap);
  t.set(ipproto::kUdp, 161, l7::kSnmp);
  t.set(ipproto::kTcp, 443, l7::kTls);
  return t;
}

L7Table L7Table::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open L7 table " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse(text.str(), path.string());
}

L7Table L7Table::parse(std::string_view text, std::string_view origin) {
  L7Table table;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    const std::string_view raw = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    const auto line = trim(raw);
    if (line.empty() || line.front() == '#') continue;

    const auto bad = [&](const std::string& why) {
      return ParseError(line_no, std::string(origin) + ": " + why + ": '" + std::string(line) + "'");
    };
    const auto c1 = line.find(',');
    const auto c2 = c1 == std::string_view::npos ? c1 : line.find(',', c1 + 1);
    if (c2 == std::string_view::npos || line.find(',', c2 + 1) != std::string_view::npos) {
      throw bad("expected protocol,port,id");
    }
    const auto proto_text = trim(line.substr(0, c1));
    std::optional<std::uint8_t> proto;
    if (proto_text == "tcp") proto = ipproto::kTcp;
    else if (proto_text == "udp") proto = ipproto::kUdp;
    else proto = parse_number<std::uint8_t>(proto_text, 255);
    const auto port = parse_number<std::uint16_t>(trim(line.substr(c1 + 1, c2 - c1 - 1)), 65535);
    const auto id = parse_number<std::uint16_t>(trim(line.substr(c2 + 1)), 65535);
    if (!proto) throw bad("unknown protocol");
    if (!port) throw bad("invalid port");
    if (!id) throw bad("invalid id");
    table.set(*proto, *port, *id);
  }
  return table;
}

void L7Table::set(std::uint8_t l4_protocol, std::uint16_t port, std::uint16_t id) {
  entries_[{l4_protocol, port}] = id;
}

std::uint16_t L7Table::lookup(std::uint8_t l4_protocol, std::uint16_t port) const {
  const auto it = entries_.find({l4_protocol, port});
  return it == entries_.end() ? l7::kUnknown : it->second;
}

std::uint16_t classify_l7(const FlowKey& key, const L7Table& table) {
  return table.lookup(key.l4_protocol, std::min(key.client_port, key.server_port));
}

} // namespace nfmeter
