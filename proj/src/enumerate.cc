#include "anomaly_lens/enumerate.h"

#include <algorithm>
#include <cstdlib>
#include <limits>
#include <map>
#include <sstream>

#include <json.hpp>

namespace anomaly_lens {

namespace {

using enum PopKind;

constexpr PopKind kBaseKinds[] = {kWW, kWR, kRW};
constexpr PopKind kBackKinds[] = {kWW, kWR, kRW, kWCR, kWCW, kRCW};
constexpr PopKind kSelfKinds[] = {kWWC, kWWA, kWRA};

// (first op letter, second op letter) of a POP kind.
std::pair<char, char> letters(PopKind k) {
  switch (k) {
    case kWW: case kWWC: case kWWA: case kWCW: return {'W', 'W'};
    case kWR: case kWRA: case kWCR: return {'W', 'R'};
    case kRW: case kRCW: return {'R', 'W'};
  }
  return {'?', '?'};
}

// The ops of a two-edge cycle laid out as i, j, [j], [C_j], i. A commit of
// t_j only separates anything when t_j wrote.
std::string pair_signature(PopKind pij, PopKind pji, Subclass sub) {
  auto [a, b] = letters(pij);
  auto [c, d] = letters(pji);
  std::string sig{a};
  char last_j;
  if (sub == Subclass::kSDA) {
    last_j = (b == 'W' || c == 'W') ? 'W' : 'R';
    sig += last_j;
  } else {
    sig += b;
    sig += c;
    last_j = c;
  }
  if (is_committed_kind(pji) && last_j == 'W') sig += 'C';
  sig += d;
  return sig;
}

int form_with_signature(const std::string& sig, Subclass sub) {
  int lo = sub == Subclass::kSDA ? 3 : 12;
  int hi = sub == Subclass::kSDA ? 11 : 26;
  for (int n = lo; n <= hi; ++n) {
    if (form_signature(n) == sig) return n;
  }
  return 0;
}

struct Override {
  PopKind pij, pji;
  int form;
  const char* note;
};

// Pairs whose name is not the one their op letters spell.
constexpr Override kSdaOverrides[] = {
    {kWR, kRCW, 4,
     "letters spell W_iR_jW_i; the case analysis calls W_iR_jC_j-R_jC_jW_i benign, the figure caption names it "
     "Full-Write Committed"},
};

CatalogEntry make_entry(PopKind pij, std::optional<PopKind> pji, int form, std::string signature, std::string note) {
  CatalogEntry e;
  e.pij = pij;
  e.pji = pji;
  e.form = form;
  const AnomalyForm& f = form_by_number(form);
  e.name = std::string(f.name);
  std::vector<PopKind> kinds{pij};
  if (pji) kinds.push_back(*pji);
  e.cls = class_of(kinds);
  e.signature = std::move(signature);
  e.note = std::move(note);
  return e;
}

void add_self_cycle_pairs(Catalog& c) {
  for (PopKind pij : kAllPopKinds) {
    if (is_committed_kind(pij)) continue;
    for (PopKind pji : kAllPopKinds) {
      if (!is_self_cycle(pij) && !is_self_cycle(pji)) continue;
      bool dirty_write = pij == kWWC || pij == kWWA || pji == kWWC || pji == kWWA;
      c.entries.push_back(make_entry(pij, pji, dirty_write ? 1 : 2, "", "contains a self-cycle POP"));
    }
  }
}

Catalog build(Subclass sub) {
  Catalog c;
  c.subclass = sub;
  if (sub == Subclass::kSDA) {
    for (PopKind k : kSelfKinds) c.entries.push_back(make_entry(k, std::nullopt, k == kWRA ? 2 : 1, "", ""));
  }
  for (PopKind pij : kBaseKinds) {
    for (PopKind pji : kBackKinds) {
      std::string sig = pair_signature(pij, pji, sub);
      int form = form_with_signature(sig, sub);
      std::string note;
      if (sub == Subclass::kSDA) {
        for (const Override& o : kSdaOverrides) {
          if (o.pij == pij && o.pji == pji) {
            form = o.form;
            note = o.note;
          }
        }
      } else if (is_committed_kind(pji) && letters(pji).first == 'R') {
        note = "C_j after R_j does not separate; same form as the uncommitted pair";
      }
      if (form == 0) throw std::logic_error("no form for signature " + sig);
      c.entries.push_back(make_entry(pij, pji, form, sig, note));
    }
  }
  add_self_cycle_pairs(c);
  return c;
}

std::uint64_t sat_mul(std::uint64_t a, std::uint64_t b) {
  if (a != 0 && b > std::numeric_limits<std::uint64_t>::max() / a) return std::numeric_limits<std::uint64_t>::max();
  return a * b;
}

struct ProgOp {
  OpKind kind;
  std::size_t var;  // ignored for terminals
};

using Program = std::vector<ProgOp>;

std::vector<Program> programs(const EnumSpec& spec) {
  std::vector<Program> out;
  std::vector<ProgOp> choices;
  for (OpKind k : {OpKind::kRead, OpKind::kWrite}) {
    for (std::size_t v = 0; v < spec.num_vars; ++v) choices.push_back({k, v});
  }
  std::vector<std::size_t> digits;
  for (std::size_t len = 1; len <= spec.max_data_ops_per_txn; ++len) {
    digits.assign(len, 0);
    while (true) {
      Program base;
      for (std::size_t d : digits) base.push_back(choices[d]);
      if (spec.include_terminals) {
        for (OpKind t : {OpKind::kCommit, OpKind::kAbort}) {
          Program p = base;
          p.push_back({t, 0});
          out.push_back(std::move(p));
        }
      }
      out.push_back(std::move(base));
      std::size_t k = len;
      while (k > 0 && ++digits[k - 1] == choices.size()) digits[--k] = 0;
      if (k == 0) break;
    }
  }
  return out;
}

// Depth-first over interleavings of one program tuple.
class Interleaver {
 public:
  Interleaver(const EnumSpec& spec, const std::vector<const Program*>& progs,
              const std::function<void(const Schedule&)>& visit)
      : spec_(spec), progs_(progs), visit_(visit), next_(progs.size(), 0), newest_(spec.num_vars, 0) {
    for (const Program* p : progs) total_ += p->size();
    ops_.reserve(total_);
  }

  void run() { step(); }

 private:
  void step() {
    if (ops_.size() == total_) {
      visit_(Schedule::from_ops(ops_, spec_.lax_versions ? VersionMode::kLax : VersionMode::kStrict));
      return;
    }
    for (std::size_t t = 0; t < progs_.size(); ++t) {
      if (next_[t] == progs_[t]->size()) continue;
      if (next_[t] == 0 && t != started_) continue;  // t1 acts first, then t2, ...
      const ProgOp& p = (*progs_[t])[next_[t]];
      Op op;
      op.kind = p.kind;
      op.txn = static_cast<TxnId>(t + 1);
      Version saved = 0;
      bool new_var = false;
      if (p.kind == OpKind::kRead || p.kind == OpKind::kWrite) {
        if (p.var > vars_seen_) continue;
        new_var = p.var == vars_seen_;
        op.var = var_name(p.var);
        saved = newest_[p.var];
        if (p.kind == OpKind::kWrite) ++newest_[p.var];
        op.version = newest_[p.var];
      }
      bool starts = next_[t] == 0;
      if (starts) ++started_;
      if (new_var) ++vars_seen_;
      ++next_[t];
      ops_.push_back(std::move(op));
      step();
      ops_.pop_back();
      --next_[t];
      if (new_var) --vars_seen_;
      if (starts) --started_;
      if (p.kind == OpKind::kRead || p.kind == OpKind::kWrite) newest_[p.var] = saved;
    }
  }

  const EnumSpec& spec_;
  const std::vector<const Program*>& progs_;
  const std::function<void(const Schedule&)>& visit_;
  std::vector<std::size_t> next_;
  std::vector<Version> newest_;
  std::vector<Op> ops_;
  std::size_t total_ = 0;
  std::size_t started_ = 0;
  std::size_t vars_seen_ = 0;
};

const char* kind_json(PopKind k) { return to_string(k).data(); }

}  // namespace

std::set<int> Catalog::forms() const {
  std::set<int> out;
  for (const CatalogEntry& e : entries) {
    if (e.note != "contains a self-cycle POP") out.insert(e.form);
  }
  return out;
}

const CatalogEntry* Catalog::find(PopKind pij, std::optional<PopKind> pji) const {
  for (const CatalogEntry& e : entries) {
    if (e.pij == pij && e.pji == pji) return &e;
  }
  return nullptr;
}

Catalog enumerate_sda() { return build(Subclass::kSDA); }
Catalog enumerate_dda() { return build(Subclass::kDDA); }

std::string form_signature(int form) {
  std::string_view formal = form_by_number(form).formal;
  std::string sig;
  for (std::size_t k = 0; k + 1 < formal.size(); ++k) {
    char c = formal[k];
    if ((c == 'R' || c == 'W' || c == 'C' || c == 'A') && formal[k + 1] == '{') sig.push_back(c);
  }
  return sig;
}

std::string catalog_table(const Catalog& c) {
  std::ostringstream out;
  out << (c.subclass == Subclass::kSDA ? "p_ij[x]" : "p_ij[x]") << '\t'
      << (c.subclass == Subclass::kSDA ? "p_ji[x]" : "p_ji[y]") << "\tform\tclass\tname\tnote\n";
  for (const CatalogEntry& e : c.entries) {
    out << to_string(e.pij) << '\t' << (e.pji ? std::string(to_string(*e.pji)) : "-") << '\t' << '(' << e.form
        << ")\t" << to_string(e.cls) << '\t' << e.name << '\t' << (e.note.empty() ? "-" : e.note) << '\n';
  }
  out << "forms: " << c.forms().size() << '\n';
  return out.str();
}

std::string catalog_json(const Catalog& c) {
  nlohmann::ordered_json j;
  j["subclass"] = std::string(to_string(c.subclass));
  j["forms"] = c.forms();
  j["entries"] = nlohmann::ordered_json::array();
  for (const CatalogEntry& e : c.entries) {
    nlohmann::ordered_json row;
    row["pij"] = kind_json(e.pij);
    row["pji"] = e.pji ? nlohmann::ordered_json(kind_json(*e.pji)) : nlohmann::ordered_json(nullptr);
    row["form"] = e.form;
    row["name"] = e.name;
    row["class"] = std::string(to_string(e.cls));
    if (!e.signature.empty()) row["signature"] = e.signature;
    if (!e.note.empty()) row["note"] = e.note;
    j["entries"].push_back(std::move(row));
  }
  return j.dump(2) + "\n";
}

std::optional<PopKind> fold_pattern(std::string_view pattern) {
  std::vector<Op> ops;
  std::map<char, TxnId> ids{{'i', 1}, {'j', 2}};
  Version newest = 0;
  for (std::size_t k = 0; k < pattern.size(); ++k) {
    char c = pattern[k];
    if (c == '[') break;
    if (c != 'R' && c != 'W' && c != 'C' && c != 'A') continue;
    std::size_t t = k + 1;
    if (t < pattern.size() && pattern[t] == '_') ++t;
    if (t >= pattern.size() || !ids.contains(pattern[t])) {
      throw std::invalid_argument("bad POP pattern '" + std::string(pattern) + "'");
    }
    Op op;
    op.txn = ids[pattern[t]];
    switch (c) {
      case 'R': op.kind = OpKind::kRead; break;
      case 'W': op.kind = OpKind::kWrite; break;
      case 'C': op.kind = OpKind::kCommit; break;
      default: op.kind = OpKind::kAbort; break;
    }
    if (op.is_data()) {
      op.var = "x";
      if (op.is_write()) ++newest;
      op.version = newest;
    }
    ops.push_back(std::move(op));
    k = t;
  }
  auto first = std::find_if(ops.begin(), ops.end(), [](const Op& op) { return op.is_data(); });
  if (first == ops.end()) throw std::invalid_argument("POP pattern without data ops '" + std::string(pattern) + "'");
  TxnId from = first->txn;
  Schedule s = Schedule::from_ops(std::move(ops));
  for (const PopEdge& e : pops(s)) {
    if (e.from == from) return e.kind;
  }
  return std::nullopt;
}

CeilingExceeded::CeilingExceeded(std::uint64_t bound)
    : std::runtime_error("enumeration bound " + std::to_string(bound) + " exceeds the ceiling"), bound_(bound) {}

std::uint64_t search_space_bound(const EnumSpec& spec) {
  std::uint64_t per_txn = 0;
  std::uint64_t choices = 2 * spec.num_vars;
  std::uint64_t seqs = 1;
  for (std::size_t len = 1; len <= spec.max_data_ops_per_txn; ++len) {
    seqs = sat_mul(seqs, choices);
    per_txn += seqs;
  }
  if (spec.include_terminals) per_txn = sat_mul(per_txn, 3);
  std::uint64_t bound = 1;
  for (std::size_t t = 0; t < spec.num_txns; ++t) bound = sat_mul(bound, per_txn);
  // Interleavings of n programs of the longest length L: (nL)! / (L!)^n.
  std::uint64_t len = spec.max_data_ops_per_txn + (spec.include_terminals ? 1 : 0);
  std::uint64_t inter = 1;
  std::uint64_t placed = 0;
  for (std::size_t t = 0; t < spec.num_txns; ++t) {
    for (std::uint64_t k = 1; k <= len; ++k) {
      ++placed;
      inter = sat_mul(inter, placed);
      inter /= k;
    }
  }
  return sat_mul(bound, inter);
}

std::uint64_t ceiling_from_env() {
  const char* raw = std::getenv("ANOMALY_LENS_CEILING");
  if (!raw || !*raw) return kDefaultCeiling;
  char* end = nullptr;
  unsigned long long v = std::strtoull(raw, &end, 10);
  if (*end != '\0') return kDefaultCeiling;
  return v;
}

void for_each_schedule(const EnumSpec& spec, const std::function<void(const Schedule&)>& visit, std::size_t shard,
                       std::size_t num_shards) {
  if (spec.num_txns == 0 || spec.num_vars == 0 || spec.max_data_ops_per_txn == 0) {
    throw std::invalid_argument("enumeration counts must be at least 1");
  }
  if (num_shards == 0 || shard >= num_shards) throw std::invalid_argument("bad shard");
  std::uint64_t bound = search_space_bound(spec);
  if (bound > spec.ceiling) throw CeilingExceeded(bound);

  std::vector<Program> progs = programs(spec);
  std::vector<std::size_t> digits(spec.num_txns, 0);
  std::vector<const Program*> tuple(spec.num_txns);
  for (std::uint64_t index = 0;; ++index) {
    if (index % num_shards == shard) {
      for (std::size_t t = 0; t < spec.num_txns; ++t) tuple[t] = &progs[digits[t]];
      Interleaver(spec, tuple, visit).run();
    }
    std::size_t k = spec.num_txns;
    while (k > 0 && ++digits[k - 1] == progs.size()) digits[--k] = 0;
    if (k == 0) break;
  }
}

std::vector<Schedule> gen_schedules(const EnumSpec& spec) {
  std::vector<Schedule> out;
  for_each_schedule(spec, [&](const Schedule& s) { out.push_back(s); });
  return out;
}

std::string var_name(std::size_t k) {
  static constexpr std::string_view kNames = "xyzuvwabcdefghijklmnopqrst";
  if (k < kNames.size()) return std::string(1, kNames[k]);
  return "v" + std::string(1, kNames[k % kNames.size()]) + std::string(1, kNames[k / kNames.size() % kNames.size()]);
}

}  // namespace anomaly_lens
