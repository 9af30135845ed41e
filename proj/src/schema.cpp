// Schema normal forms. Every rewrite below is an identity in the
// topologist's product, so equal normal forms certify equal words; the
// converse is not attempted.

#include "schema_node.hpp"

namespace archipelago {

namespace {

constexpr std::size_t kExpandLimit = 100'000;

std::string element_key(const GroupElement& g) { return g.descriptor().name() + ":" + format_element(g); }

std::string list_key(const std::vector<GroupElement>& xs) {
  std::string s;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) s += ",";
    s += format_element(xs[i]);
  }
  return s;
}

std::string atom_key(const NfItem& it) {
  switch (it.kind) {
    case NfItem::Kind::Word:
      return format_word(it.word);
    case NfItem::Kind::Nest: {
      const auto& r = *it.nest;
      return "nest(from=" + std::to_string(it.level) + ",off=" + std::to_string(r.index_offset) +
             ",a=" + element_key(r.element) + ",e=" + std::to_string(r.exp_mul) + "k+" + std::to_string(r.exp_add) + ")";
    }
    case NfItem::Kind::Eps: {
      const auto& r = *it.eps;
      const auto& d = r.coords.period().front().descriptor();
      return "eps(start=" + std::to_string(r.start_index) + ",above=" + std::to_string(it.cut) + "," + d.name() + ":[" +
             list_key(r.coords.prefix()) + "|" + list_key(r.coords.period()) + "])";
    }
    case NfItem::Kind::Pow:
      return "(" + format_normal_form(*it.inner) + ")";
    case NfItem::Kind::Opaque:
      return it.cut ? "tau[" + std::to_string(it.cut) + "](" + it.key + ")" : it.key;
  }
  return {};
}

bool is_atom(const NfItem& it) { return it.kind != NfItem::Kind::Word; }

NfItem word_item(FiniteWord w) {
  NfItem it;
  it.kind = NfItem::Kind::Word;
  it.word = std::move(w);
  return it;
}

/// Lowers an eps cut past identity coordinates; false if the atom is trivial.
bool canonical_eps(NfItem& it) {
  const auto& r = *it.eps;
  if (r.coords.all_identity()) return false;
  if (it.cut < r.start_index - 1) it.cut = r.start_index - 1;
  while (it.cut >= r.start_index && r.element_at_index(it.cut).is_identity()) --it.cut;
  return true;
}

/// The letter that folds into the atom from the left, when there is one.
std::optional<Letter> fold_letter(const NfItem& it) {
  if (it.kind == NfItem::Kind::Nest) {
    const auto& r = *it.nest;
    if (it.level < 2) return std::nullopt;
    const Index prev = it.level - 1;
    if (static_cast<std::int64_t>(prev) + r.index_offset < 1) return std::nullopt;
    if (r.exponent_at(prev) < 1) return std::nullopt;
    return Letter{r.index_at(prev), r.element};
  }
  if (it.kind == NfItem::Kind::Eps) {
    if (it.cut < it.eps->start_index) return std::nullopt;
    return Letter{it.cut, it.eps->element_at_index(it.cut)};
  }
  return std::nullopt;
}

/// Exponent the atom must carry for a left fold (right folds need its negative).
std::int64_t fold_exponent(const NfItem& it) {
  if (it.kind == NfItem::Kind::Nest) return it.nest->exponent_at(it.level - 1);
  return 1;
}

NfItem folded(const NfItem& it, std::int64_t sign) {
  NfItem out = it;
  if (it.kind == NfItem::Kind::Nest)
    --out.level;
  else
    --out.cut;
  out.exp = sign;
  return out;
}

FiniteWord drop_back(const FiniteWord& w) {
  return FiniteWord::from_reduced({w.letters().begin(), w.letters().end() - 1});
}

FiniteWord drop_front(const FiniteWord& w) {
  return FiniteWord::from_reduced({w.letters().begin() + 1, w.letters().end()});
}

void push_item(NormalForm& out, NfItem it);

void push_word(NormalForm& out, FiniteWord w) {
  if (w.empty()) return;
  if (!out.empty() && out.back().kind == NfItem::Kind::Word) {
    FiniteWord merged = concat(out.back().word, w);
    out.pop_back();
    push_word(out, std::move(merged));
    return;
  }
  if (!out.empty()) {
    const NfItem& prev = out.back();
    if (auto a = fold_letter(prev); a && prev.exp == -fold_exponent(prev)) {
      const Letter inv{a->index, group_inverse(a->element)};
      if (w.front() == inv) {
        NfItem atom = folded(prev, -1);
        out.pop_back();
        push_item(out, std::move(atom));
        push_word(out, drop_front(w));
        return;
      }
    }
  }
  out.push_back(word_item(std::move(w)));
}

void push_item(NormalForm& out, NfItem it) {
  if (it.kind == NfItem::Kind::Word) {
    push_word(out, std::move(it.word));
    return;
  }
  if (it.exp == 0) return;
  if (it.kind == NfItem::Kind::Eps && !canonical_eps(it)) return;
  if (!out.empty()) {
    NfItem& prev = out.back();
    if (is_atom(prev) && prev.kind == it.kind && atom_key(prev) == atom_key(it)) {
      std::int64_t sum;
      if (__builtin_add_overflow(prev.exp, it.exp, &sum)) throw ResourceError("exponent sum overflows 64 bits");
      NfItem merged = prev;
      merged.exp = sum;
      out.pop_back();
      push_item(out, std::move(merged));
      return;
    }
    if (prev.kind == NfItem::Kind::Word) {
      if (auto a = fold_letter(it); a && it.exp == fold_exponent(it) && prev.word.back() == *a) {
        FiniteWord rest = drop_back(prev.word);
        out.pop_back();
        push_word(out, std::move(rest));
        push_item(out, folded(it, 1));
        return;
      }
    }
  }
  out.push_back(std::move(it));
}

NormalForm normalize(const NormalForm& items) {
  NormalForm out;
  for (const auto& it : items) push_item(out, it);
  return out;
}

NormalForm inverse_nf(const NormalForm& nf) {
  NormalForm out;
  for (auto it = nf.rbegin(); it != nf.rend(); ++it) {
    NfItem x = *it;
    if (x.kind == NfItem::Kind::Word)
      x.word = invert(x.word);
    else
      x.exp = checked_mul(x.exp, -1);
    push_item(out, std::move(x));
  }
  return out;
}

NormalForm power_nf(const NormalForm& nf, std::int64_t m) {
  if (m == 0 || nf.empty()) return {};
  if (m == 1) return nf;
  if (nf.size() == 1) {
    const NfItem& only = nf.front();
    if (only.kind == NfItem::Kind::Word) {
      const auto len = static_cast<unsigned __int128>(only.word.size()) *
                       static_cast<unsigned __int128>(m < 0 ? -static_cast<__int128>(m) : m);
      if (len <= kExpandLimit) return normalize({word_item(power(only.word, m))});
    } else {
      NfItem x = only;
      x.exp = checked_mul(x.exp, m);
      return normalize({x});
    }
  }
  NfItem p;
  p.kind = NfItem::Kind::Pow;
  p.inner = std::make_shared<const NormalForm>(nf);
  p.exp = m;
  return normalize({p});
}

NormalForm tau_nf(const NormalForm& nf, Index j) {
  NormalForm out;
  for (const auto& it : nf) {
    switch (it.kind) {
      case NfItem::Kind::Word:
        push_word(out, project_above(it.word, j));
        break;
      case NfItem::Kind::Nest: {
        const auto& r = *it.nest;
        if (r.index_at(it.level) > j) {
          push_item(out, it);
          break;
        }
        const auto target = static_cast<Index>(r.level_of(j + 1));
        std::int64_t e = it.exp;
        for (Index l = it.level; l < target; ++l) e = checked_mul(e, r.exponent_at(l));
        NfItem x = it;
        x.level = target;
        x.exp = e;
        push_item(out, std::move(x));
        break;
      }
      case NfItem::Kind::Eps:
      case NfItem::Kind::Opaque: {
        NfItem x = it;
        x.cut = std::max(x.cut, j);
        push_item(out, std::move(x));
        break;
      }
      case NfItem::Kind::Pow:
        for (auto& x : power_nf(tau_nf(*it.inner, j), it.exp)) push_item(out, std::move(x));
        break;
    }
  }
  return out;
}

bool all_words(const NormalForm& nf) {
  return nf.empty() || (nf.size() == 1 && nf.front().kind == NfItem::Kind::Word);
}

FiniteWord as_word(const NormalForm& nf) { return nf.empty() ? FiniteWord{} : nf.front().word; }

std::string index_list(const std::vector<Index>& xs) {
  std::string s;
  for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? "," : "") + std::to_string(xs[i]);
  return s;
}

NormalForm opaque(std::string key) {
  NfItem x;
  x.kind = NfItem::Kind::Opaque;
  x.key = std::move(key);
  return {x};
}

NormalForm compute_nf(const SchemaNode& node) {
  switch (node.kind) {
    case NodeKind::Finite:
      return normalize({word_item(node.word)});
    case NodeKind::Nest: {
      NfItem x;
      x.kind = NfItem::Kind::Nest;
      x.nest = node.nest;
      x.level = node.nest->start_level;
      return normalize({x});
    }
    case NodeKind::Eps: {
      NfItem x;
      x.kind = NfItem::Kind::Eps;
      x.eps = node.eps;
      x.cut = node.eps->start_index - 1;
      return normalize({x});
    }
    case NodeKind::Product: {
      NormalForm out;
      for (const auto& c : node.children)
        for (const auto& it : *normal_form_of(*c)) push_item(out, it);
      return out;
    }
    case NodeKind::Inverse:
      return inverse_nf(*normal_form_of(*node.children[0]));
    case NodeKind::Power:
      return power_nf(*normal_form_of(*node.children[0]), node.exponent);
    case NodeKind::Tau:
      return tau_nf(*normal_form_of(*node.children[0]), node.level);
    case NodeKind::Permute: {
      const auto& child = *normal_form_of(*node.children[0]);
      if (all_words(child)) return normalize({word_item(permute_word(node.perm, as_word(child)))});
      return opaque("permute[" + index_list(node.perm.head()) + "|" + index_list(node.perm.block()) + "](" +
                    format_normal_form(child) + ")");
    }
    case NodeKind::Regroup: {
      const auto& child = *normal_form_of(*node.children[0]);
      if (all_words(child))
        return normalize({word_item(regroup_word(node.partition, *node.spec, as_word(child), std::nullopt))});
      std::string blocks;
      for (const auto& b : node.partition.explicit_blocks()) blocks += "{" + index_list(b) + "}";
      return opaque("regroup[-" + index_list(node.partition.excluded()) + ";" + blocks + ";" +
                    std::to_string(node.partition.chunk()) + "](" + format_normal_form(child) + ")");
    }
  }
  return {};
}

}  // namespace

std::shared_ptr<const NormalForm> normal_form_of(const SchemaNode& node) {
  {
    std::lock_guard lock(node.mutex);
    if (node.normal_form) return node.normal_form;
  }
  auto nf = std::make_shared<const NormalForm>(compute_nf(node));
  std::lock_guard lock(node.mutex);
  if (!node.normal_form) node.normal_form = nf;
  return node.normal_form;
}

std::string format_normal_form(const NormalForm& nf) {
  if (nf.empty()) return "1";
  std::string s;
  for (std::size_t i = 0; i < nf.size(); ++i) {
    if (i) s += " ";
    s += atom_key(nf[i]);
    if (is_atom(nf[i]) && nf[i].exp != 1) s += "^" + std::to_string(nf[i].exp);
  }
  return s;
}

}  // namespace archipelago
