#include "leapforge/config.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

namespace leapforge {

using json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// TOML subset parser

namespace {

class TomlParser {
 public:
  explicit TomlParser(std::string_view text) : text_(text) {}

  json parse() {
    json root = json::object();
    json* table = &root;
    while (true) {
      skip_blank_lines();
      if (at_end()) break;
      if (peek() == '[') {
        table = &open_table(root);
      } else {
        parse_key_value(*table);
      }
      end_of_line();
    }
    return root;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw ConfigError("config line " + std::to_string(line_) + ": " + msg);
  }

  bool at_end() const { return pos_ >= text_.size(); }
  char peek() const { return at_end() ? '\0' : text_[pos_]; }
  char next() {
    const char c = text_[pos_++];
    if (c == '\n') ++line_;
    return c;
  }

  void skip_inline_space() {
    while (!at_end() && (peek() == ' ' || peek() == '\t' || peek() == '\r')) next();
  }

  void skip_comment() {
    if (peek() == '#') {
      while (!at_end() && peek() != '\n') next();
    }
  }

  void skip_blank_lines() {
    while (!at_end()) {
      skip_inline_space();
      skip_comment();
      if (peek() == '\n') {
        next();
      } else {
        break;
      }
    }
  }

  // Whitespace, comments and newlines inside arrays.
  void skip_any_space() {
    while (!at_end()) {
      const char c = peek();
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        next();
      } else if (c == '#') {
        skip_comment();
      } else {
        break;
      }
    }
  }

  void end_of_line() {
    skip_inline_space();
    skip_comment();
    if (at_end()) return;
    if (peek() != '\n') fail("unexpected trailing characters");
    next();
  }

  std::string parse_bare_key() {
    std::string key;
    while (!at_end() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_' ||
                         peek() == '-')) {
      key.push_back(next());
    }
    if (key.empty()) fail("expected a key");
    return key;
  }

  json& open_table(json& root) {
    next();  // '['
    const bool array_of_tables = peek() == '[';
    if (array_of_tables) next();
    skip_inline_space();
    const std::string name = parse_bare_key();
    skip_inline_space();
    if (peek() != ']') fail("expected ']' after table name");
    next();
    if (array_of_tables) {
      if (peek() != ']') fail("expected ']]' after table name");
      next();
      json& arr = root[name];
      if (arr.is_null()) arr = json::array();
      if (!arr.is_array()) fail("'" + name + "' is not an array of tables");
      arr.push_back(json::object());
      return arr.back();
    }
    if (root.contains(name)) fail("table '" + name + "' defined twice");
    root[name] = json::object();
    return root[name];
  }

  void parse_key_value(json& table) {
    const std::string key = parse_bare_key();
    skip_inline_space();
    if (peek() != '=') fail("expected '=' after '" + key + "'");
    next();
    skip_inline_space();
    if (table.contains(key)) fail("key '" + key + "' defined twice");
    table[key] = parse_value();
  }

  json parse_value() {
    const char c = peek();
    if (c == '"') return parse_string();
    if (c == '[') return parse_array();
    if (text_.substr(pos_, 4) == "true") {
      pos_ += 4;
      return true;
    }
    if (text_.substr(pos_, 5) == "false") {
      pos_ += 5;
      return false;
    }
    return parse_number();
  }

  json parse_string() {
    next();  // opening quote
    std::string out;
    while (true) {
      if (at_end() || peek() == '\n') fail("unterminated string");
      const char c = next();
      if (c == '"') break;
      if (c != '\\') {
        out.push_back(c);
        continue;
      }
      if (at_end()) fail("unterminated escape");
      switch (next()) {
        case '"': out.push_back('"'); break;
        case '\\': out.push_back('\\'); break;
        case 'n': out.push_back('\n'); break;
        case 't': out.push_back('\t'); break;
        default: fail("unsupported escape sequence");
      }
    }
    return out;
  }

  json parse_array() {
    next();  // '['
    json arr = json::array();
    while (true) {
      skip_any_space();
      if (at_end()) fail("unterminated array");
      if (peek() == ']') {
        next();
        return arr;
      }
      arr.push_back(parse_value());
      skip_any_space();
      if (at_end()) fail("unterminated array");
      if (peek() == ',') {
        next();
      } else if (peek() != ']') {
        fail("expected ',' or ']' in array");
      }
    }
  }

  json parse_number() {
    const std::size_t start = pos_;
    while (!at_end() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '+' ||
                         peek() == '-' || peek() == '.' || peek() == '_')) {
      next();
    }
    std::string token(text_.substr(start, pos_ - start));
    std::erase(token, '_');
    if (token.empty()) fail("expected a value");
    const bool is_float = token.find_first_of(".eE") != std::string::npos;
    const char* first = token.data();
    const char* last = token.data() + token.size();
    if (*first == '+') ++first;
    if (is_float) {
      double v = 0;
      const auto [ptr, ec] = std::from_chars(first, last, v);
      if (ec != std::errc() || ptr != last) fail("invalid number '" + token + "'");
      return v;
    }
    std::int64_t v = 0;
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last) fail("invalid value '" + token + "'");
    return v;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
};

// ---------------------------------------------------------------------------
// Tree -> Scenario

class FieldReader {
 public:
  FieldReader(const json& table, std::string prefix) : table_(table), prefix_(std::move(prefix)) {
    if (!table_.is_object()) throw ConfigError(prefix_ + ": expected a table");
  }

  std::string path(const std::string& key) const { return prefix_.empty() ? key : prefix_ + "." + key; }

  const json* find(const std::string& key) {
    seen_.insert(key);
    const auto it = table_.find(key);
    return it == table_.end() ? nullptr : &*it;
  }

  void number(const std::string& key, double& out) {
    if (const json* v = find(key)) out = as_number(*v, path(key));
  }

  void optional_number(const std::string& key, std::optional<double>& out) {
    if (const json* v = find(key)) out = as_number(*v, path(key));
  }

  template <typename Int>
  void integer(const std::string& key, Int& out) {
    if (const json* v = find(key)) {
      if (!v->is_number_integer()) throw ConfigError(path(key) + ": expected an integer");
      const auto raw = v->get<std::int64_t>();
      if (raw < 0 || static_cast<std::uint64_t>(raw) > std::numeric_limits<Int>::max()) {
        throw ConfigError(path(key) + ": integer out of range");
      }
      out = static_cast<Int>(raw);
    }
  }

  void boolean(const std::string& key, bool& out) {
    if (const json* v = find(key)) {
      if (!v->is_boolean()) throw ConfigError(path(key) + ": expected true or false");
      out = v->get<bool>();
    }
  }

  void string(const std::string& key, std::string& out) {
    if (const json* v = find(key)) {
      if (!v->is_string()) throw ConfigError(path(key) + ": expected a string");
      out = v->get<std::string>();
    }
  }

  void position(const std::string& key, std::optional<Position>& out) {
    if (const json* v = find(key)) out = as_position(*v, path(key));
  }

  static double as_number(const json& v, const std::string& where) {
    if (!v.is_number()) throw ConfigError(where + ": expected a number");
    return v.get<double>();
  }

  static Position as_position(const json& v, const std::string& where) {
    if (!v.is_array() || v.size() != 2) throw ConfigError(where + ": expected [x, y]");
    return Position{as_number(v[0], where), as_number(v[1], where)};
  }

  /// Any key present in the table but never asked for is a typo.
  void reject_unknown() const {
    for (const auto& [key, value] : table_.items()) {
      if (!seen_.contains(key)) throw ConfigError(path(key) + ": unknown key");
    }
  }

 private:
  const json& table_;
  std::string prefix_;
  std::set<std::string> seen_;
};

MsgType msg_type_from_name(const std::string& name, const std::string& where) {
  for (std::uint8_t t = 1; t <= 6; ++t) {
    if (to_string(static_cast<MsgType>(t)) == name) return static_cast<MsgType>(t);
  }
  throw ConfigError(where + ": unknown message type '" + name + "'");
}

AdversaryConfig adversary_from_tree(const json& table, const std::string& prefix) {
  FieldReader r(table, prefix);
  std::string kind;
  r.string("kind", kind);
  AdversaryConfig out;
  if (kind == "hello_flood") {
    HelloFloodConfig c;
    r.number("tx_multiplier", c.tx_multiplier);
    r.number("start_ms", c.start_ms);
    r.number("interval_ms", c.interval_ms);
    r.integer("count", c.count);
    r.integer("attacker_id", c.attacker_id);
    r.position("position", c.position);
    out = c;
  } else if (kind == "clone") {
    CloneConfig c;
    r.integer("victim_id", c.victim_id);
    r.number("capture_ms", c.capture_ms);
    r.number("activate_delay_ms", c.activate_delay_ms);
    r.position("position", c.position);
    std::string seq = "guess";
    r.string("sequence", seq);
    if (seq == "guess") {
      c.sequence = CloneSequence::Guess;
    } else if (seq == "captured") {
      c.sequence = CloneSequence::Captured;
    } else {
      throw ConfigError(r.path("sequence") + ": expected \"guess\" or \"captured\"");
    }
    out = c;
  } else if (kind == "replay") {
    ReplayConfig c;
    if (const json* w = r.find("record_window")) {
      const Position p = FieldReader::as_position(*w, r.path("record_window"));
      c.record_from_ms = p.x;
      c.record_to_ms = p.y;
    }
    r.number("replay_ms", c.replay_ms);
    if (const json* types = r.find("types")) {
      if (!types->is_array()) throw ConfigError(r.path("types") + ": expected an array of names");
      c.types.clear();
      for (const auto& t : *types) {
        if (!t.is_string()) throw ConfigError(r.path("types") + ": expected message type names");
        c.types.insert(msg_type_from_name(t.get<std::string>(), r.path("types")));
      }
    }
    out = c;
  } else if (kind == "eavesdrop") {
    out = EavesdropConfig{};
  } else {
    throw ConfigError(r.path("kind") +
                      ": expected one of hello_flood, clone, replay, eavesdrop");
  }
  r.reject_unknown();
  return out;
}

}  // namespace

json parse_toml(std::string_view text) { return TomlParser(text).parse(); }

Scenario scenario_from_tree(const json& tree) {
  Scenario s;
  FieldReader r(tree, "");
  r.string("name", s.name);
  r.integer("seed", s.seed);
  r.integer("node_count", s.node_count);
  r.number("area_m", s.area_m);
  r.position("base_station", s.base_station);
  r.number("t_min_ms", s.t_min_ms);
  r.number("boot_jitter_ms", s.boot_jitter_ms);
  r.boolean("audits", s.audits);
  r.optional_number("audit_start_ms", s.audit_start_ms);
  r.number("audit_period_ms", s.audit_period_ms);
  r.number("response_deadline_ms", s.response_deadline_ms);
  r.integer("chain_length", s.chain_length);
  r.number("horizon_ms", s.horizon_ms);
  if (const json* positions = r.find("positions")) {
    if (!positions->is_array()) throw ConfigError("positions: expected an array of [x, y]");
    for (const auto& p : *positions) s.positions.push_back(FieldReader::as_position(p, "positions"));
    // An explicit layout fixes the node count unless it is also given.
    if (!tree.contains("node_count")) s.node_count = s.positions.size();
  }
  if (const json* radio = r.find("radio")) {
    FieldReader rr(*radio, "radio");
    rr.number("range_m", s.radio.range_m);
    rr.number("latency_ms", s.radio.latency_ms);
    rr.number("jitter_ms", s.radio.jitter_ms);
    rr.number("loss_prob", s.radio.loss_prob);
    rr.reject_unknown();
  }
  if (const json* advs = r.find("adversary")) {
    if (!advs->is_array()) throw ConfigError("adversary: use [[adversary]] tables");
    for (std::size_t i = 0; i < advs->size(); ++i) {
      s.adversaries.push_back(adversary_from_tree((*advs)[i], "adversary[" + std::to_string(i) + "]"));
    }
  }
  r.reject_unknown();
  return s;
}

Scenario parse_scenario(std::string_view toml_text) { return scenario_from_tree(parse_toml(toml_text)); }

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

// ---------------------------------------------------------------------------
// Scenario -> TOML

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  std::string out(buf, ptr);
  if (out.find_first_of(".eEn") == std::string::npos) out += ".0";
  return out;
}

namespace {

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out.push_back(c);
    }
  }
  return out + "\"";
}

std::string pos_str(const Position& p) { return "[" + format_double(p.x) + ", " + format_double(p.y) + "]"; }

}  // namespace

std::string scenario_to_toml(const Scenario& s) {
  std::ostringstream os;
  os << "name = " << quote(s.name) << "\n";
  os << "seed = " << s.seed << "\n";
  os << "node_count = " << s.node_count << "\n";
  os << "area_m = " << format_double(s.area_m) << "\n";
  if (s.base_station) os << "base_station = " << pos_str(*s.base_station) << "\n";
  os << "t_min_ms = " << format_double(s.t_min_ms) << "\n";
  os << "boot_jitter_ms = " << format_double(s.boot_jitter_ms) << "\n";
  os << "audits = " << (s.audits ? "true" : "false") << "\n";
  if (s.audit_start_ms) os << "audit_start_ms = " << format_double(*s.audit_start_ms) << "\n";
  os << "audit_period_ms = " << format_double(s.audit_period_ms) << "\n";
  os << "response_deadline_ms = " << format_double(s.response_deadline_ms) << "\n";
  os << "chain_length = " << s.chain_length << "\n";
  os << "horizon_ms = " << format_double(s.horizon_ms) << "\n";
  if (!s.positions.empty()) {
    os << "positions = [\n";
    for (const auto& p : s.positions) os << "  " << pos_str(p) << ",\n";
    os << "]\n";
  }
  os << "\n[radio]\n";
  os << "range_m = " << format_double(s.radio.range_m) << "\n";
  os << "latency_ms = " << format_double(s.radio.latency_ms) << "\n";
  os << "jitter_ms = " << format_double(s.radio.jitter_ms) << "\n";
  os << "loss_prob = " << format_double(s.radio.loss_prob) << "\n";

  for (const auto& adv : s.adversaries) {
    os << "\n[[adversary]]\nkind = " << quote(std::string(adversary_kind(adv))) << "\n";
    std::visit(
        [&os](const auto& a) {
          using T = std::decay_t<decltype(a)>;
          if constexpr (std::is_same_v<T, HelloFloodConfig>) {
            os << "tx_multiplier = " << format_double(a.tx_multiplier) << "\n";
            os << "start_ms = " << format_double(a.start_ms) << "\n";
            os << "interval_ms = " << format_double(a.interval_ms) << "\n";
            os << "count = " << a.count << "\n";
            os << "attacker_id = " << a.attacker_id << "\n";
            if (a.position) os << "position = " << pos_str(*a.position) << "\n";
          } else if constexpr (std::is_same_v<T, CloneConfig>) {
            os << "victim_id = " << a.victim_id << "\n";
            os << "capture_ms = " << format_double(a.capture_ms) << "\n";
            os << "activate_delay_ms = " << format_double(a.activate_delay_ms) << "\n";
            if (a.position) os << "position = " << pos_str(*a.position) << "\n";
            os << "sequence = " << (a.sequence == CloneSequence::Guess ? "\"guess\"" : "\"captured\"")
               << "\n";
          } else if constexpr (std::is_same_v<T, ReplayConfig>) {
            os << "record_window = [" << format_double(a.record_from_ms) << ", "
               << format_double(a.record_to_ms) << "]\n";
            os << "replay_ms = " << format_double(a.replay_ms) << "\n";
            os << "types = [";
            bool first = true;
            for (MsgType t : a.types) {
              os << (first ? "" : ", ") << quote(std::string(to_string(t)));
              first = false;
            }
            os << "]\n";
          }
        },
        adv);
  }
  return os.str();
}

}  // namespace leapforge
