#include "natpatl/omega.hpp"

#include <map>
#include <ostream>
#include <set>
#include <unordered_map>

namespace natpatl {

// ---------------------------------------------------------------------------
// LTL nodes
// ---------------------------------------------------------------------------

namespace {

LtlPtr mk(Ltl::Kind k, int atom, LtlPtr a, LtlPtr b) {
    return std::make_shared<Ltl>(Ltl{k, atom, std::move(a), std::move(b)});
}

}  // namespace

LtlPtr Ltl::tt() { return mk(Kind::True, -1, nullptr, nullptr); }
LtlPtr Ltl::ff() { return mk(Kind::False, -1, nullptr, nullptr); }
LtlPtr Ltl::atom_(int id) { return mk(Kind::Atom, id, nullptr, nullptr); }
LtlPtr Ltl::natom(int id) { return mk(Kind::NotAtom, id, nullptr, nullptr); }
LtlPtr Ltl::and_(LtlPtr a, LtlPtr b) { return mk(Kind::And, -1, std::move(a), std::move(b)); }
LtlPtr Ltl::or_(LtlPtr a, LtlPtr b) { return mk(Kind::Or, -1, std::move(a), std::move(b)); }
LtlPtr Ltl::next(LtlPtr a) { return mk(Kind::Next, -1, std::move(a), nullptr); }
LtlPtr Ltl::until(LtlPtr a, LtlPtr b) { return mk(Kind::Until, -1, std::move(a), std::move(b)); }
LtlPtr Ltl::release(LtlPtr a, LtlPtr b) {
    return mk(Kind::Release, -1, std::move(a), std::move(b));
}

LtlPtr Ltl::negate(const LtlPtr& f) {
    switch (f->kind) {
        case Kind::True: return ff();
        case Kind::False: return tt();
        case Kind::Atom: return natom(f->atom);
        case Kind::NotAtom: return atom_(f->atom);
        case Kind::And: return or_(negate(f->lhs), negate(f->rhs));
        case Kind::Or: return and_(negate(f->lhs), negate(f->rhs));
        case Kind::Next: return next(negate(f->lhs));
        case Kind::Until: return release(negate(f->lhs), negate(f->rhs));
        case Kind::Release: return until(negate(f->lhs), negate(f->rhs));
    }
    throw Error("unreachable ltl kind");
}

std::string print_ltl(const LtlPtr& f) {
    switch (f->kind) {
        case Ltl::Kind::True: return "true";
        case Ltl::Kind::False: return "false";
        case Ltl::Kind::Atom: return "a" + std::to_string(f->atom);
        case Ltl::Kind::NotAtom: return "!a" + std::to_string(f->atom);
        case Ltl::Kind::And: return "(" + print_ltl(f->lhs) + " & " + print_ltl(f->rhs) + ")";
        case Ltl::Kind::Or: return "(" + print_ltl(f->lhs) + " | " + print_ltl(f->rhs) + ")";
        case Ltl::Kind::Next: return "X " + print_ltl(f->lhs);
        case Ltl::Kind::Until:
            return "(" + print_ltl(f->lhs) + " U " + print_ltl(f->rhs) + ")";
        case Ltl::Kind::Release:
            return "(" + print_ltl(f->lhs) + " R " + print_ltl(f->rhs) + ")";
    }
    return "?";
}

int ltl_size(const LtlPtr& f) {
    int n = 1;
    if (f->lhs) n += ltl_size(f->lhs);
    if (f->rhs) n += ltl_size(f->rhs);
    return n;
}

// ---------------------------------------------------------------------------
// Lasso semantics (the module's correctness oracle)
// ---------------------------------------------------------------------------

namespace {

std::vector<bool> eval_lasso(const LtlPtr& f, const std::vector<Letter>& w,
                             std::size_t loop) {
    std::size_t n = w.size();
    auto succ = [&](std::size_t i) { return i + 1 < n ? i + 1 : loop; };
    std::vector<bool> v(n);
    switch (f->kind) {
        case Ltl::Kind::True: v.assign(n, true); return v;
        case Ltl::Kind::False: v.assign(n, false); return v;
        case Ltl::Kind::Atom:
            for (std::size_t i = 0; i < n; ++i) v[i] = (w[i] >> f->atom) & 1;
            return v;
        case Ltl::Kind::NotAtom:
            for (std::size_t i = 0; i < n; ++i) v[i] = !((w[i] >> f->atom) & 1);
            return v;
        case Ltl::Kind::And: {
            auto a = eval_lasso(f->lhs, w, loop), b = eval_lasso(f->rhs, w, loop);
            for (std::size_t i = 0; i < n; ++i) v[i] = a[i] && b[i];
            return v;
        }
        case Ltl::Kind::Or: {
            auto a = eval_lasso(f->lhs, w, loop), b = eval_lasso(f->rhs, w, loop);
            for (std::size_t i = 0; i < n; ++i) v[i] = a[i] || b[i];
            return v;
        }
        case Ltl::Kind::Next: {
            auto a = eval_lasso(f->lhs, w, loop);
            for (std::size_t i = 0; i < n; ++i) v[i] = a[succ(i)];
            return v;
        }
        case Ltl::Kind::Until: {
            auto a = eval_lasso(f->lhs, w, loop), b = eval_lasso(f->rhs, w, loop);
            v.assign(n, false);  // least fixpoint of b | (a & X v)
            for (bool changed = true; changed;) {
                changed = false;
                for (std::size_t i = n; i-- > 0;) {
                    bool nv = b[i] || (a[i] && v[succ(i)]);
                    if (nv != v[i]) { v[i] = nv; changed = true; }
                }
            }
            return v;
        }
        case Ltl::Kind::Release: {
            auto a = eval_lasso(f->lhs, w, loop), b = eval_lasso(f->rhs, w, loop);
            v.assign(n, true);  // greatest fixpoint of b & (a | X v)
            for (bool changed = true; changed;) {
                changed = false;
                for (std::size_t i = n; i-- > 0;) {
                    bool nv = b[i] && (a[i] || v[succ(i)]);
                    if (nv != v[i]) { v[i] = nv; changed = true; }
                }
            }
            return v;
        }
    }
    throw Error("unreachable ltl kind");
}

}  // namespace

bool ltl_holds_lasso(const LtlPtr& f, const std::vector<Letter>& prefix,
                     const std::vector<Letter>& period) {
    if (period.empty()) throw Error("lasso period must be non-empty");
    std::vector<Letter> w = prefix;
    w.insert(w.end(), period.begin(), period.end());
    return eval_lasso(f, w, prefix.size())[0];
}

// ---------------------------------------------------------------------------
// LTL -> NBA: closure-valuation construction, degeneralized
// ---------------------------------------------------------------------------

namespace {

void collect_closure(const LtlPtr& f, std::vector<LtlPtr>& list,
                     std::map<std::string, int>& index) {
    std::string key = print_ltl(f);
    if (index.count(key)) return;
    if (f->lhs) collect_closure(f->lhs, list, index);
    if (f->rhs) collect_closure(f->rhs, list, index);
    index[key] = static_cast<int>(list.size());
    list.push_back(f);
}

}  // namespace

Nba ltl_to_nba(const LtlPtr& f, int num_atoms) {
    std::vector<LtlPtr> cl;
    std::map<std::string, int> cl_index;
    collect_closure(f, cl, cl_index);
    int c = static_cast<int>(cl.size());
    if (c > 24) throw StateBudgetExceededError("LTL closure too large", 24);
    int root = cl_index[print_ltl(f)];

    auto idx = [&](const LtlPtr& g) { return cl_index.at(print_ltl(g)); };

    auto consistent = [&](std::uint32_t m) {
        for (int i = 0; i < c; ++i) {
            if (!((m >> i) & 1)) continue;
            const Ltl& g = *cl[i];
            switch (g.kind) {
                case Ltl::Kind::False: return false;
                case Ltl::Kind::And:
                    if (!((m >> idx(g.lhs)) & 1) || !((m >> idx(g.rhs)) & 1)) return false;
                    break;
                case Ltl::Kind::Or:
                    if (!((m >> idx(g.lhs)) & 1) && !((m >> idx(g.rhs)) & 1)) return false;
                    break;
                case Ltl::Kind::Until:
                    if (!((m >> idx(g.lhs)) & 1) && !((m >> idx(g.rhs)) & 1)) return false;
                    break;
                case Ltl::Kind::Release:
                    if (!((m >> idx(g.rhs)) & 1)) return false;
                    break;
                case Ltl::Kind::Atom:
                case Ltl::Kind::NotAtom: {
                    // Conflicting literal over the same pseudo-atom.
                    for (int j = 0; j < c; ++j) {
                        if (!((m >> j) & 1) || j == i) continue;
                        if ((cl[j]->kind == Ltl::Kind::Atom ||
                             cl[j]->kind == Ltl::Kind::NotAtom) &&
                            cl[j]->atom == g.atom && cl[j]->kind != g.kind)
                            return false;
                    }
                    break;
                }
                default: break;
            }
        }
        return true;
    };

    std::vector<std::uint32_t> all;
    for (std::uint32_t m = 0; m < (1u << c); ++m)
        if (consistent(m)) all.push_back(m);

    auto obligations = [&](std::uint32_t m) {
        std::uint32_t o = 0;
        for (int i = 0; i < c; ++i) {
            if (!((m >> i) & 1)) continue;
            const Ltl& g = *cl[i];
            if (g.kind == Ltl::Kind::Next) o |= 1u << idx(g.lhs);
            if (g.kind == Ltl::Kind::Until && !((m >> idx(g.rhs)) & 1)) o |= 1u << i;
            if (g.kind == Ltl::Kind::Release && !((m >> idx(g.lhs)) & 1)) o |= 1u << i;
        }
        return o;
    };

    auto letter_ok = [&](std::uint32_t m, Letter letter) {
        for (int i = 0; i < c; ++i) {
            if (!((m >> i) & 1)) continue;
            if (cl[i]->kind == Ltl::Kind::Atom && !((letter >> cl[i]->atom) & 1))
                return false;
            if (cl[i]->kind == Ltl::Kind::NotAtom && ((letter >> cl[i]->atom) & 1))
                return false;
        }
        return true;
    };

    // Reachable generalized-Buchi states.
    std::map<std::uint32_t, int> gba_index;
    std::vector<std::uint32_t> gba;
    auto intern = [&](std::uint32_t m) {
        auto it = gba_index.find(m);
        if (it != gba_index.end()) return it->second;
        int id = static_cast<int>(gba.size());
        gba_index[m] = id;
        gba.push_back(m);
        return id;
    };
    std::vector<int> initials;
    for (std::uint32_t m : all)
        if ((m >> root) & 1) initials.push_back(intern(m));

    int num_letters = 1 << num_atoms;
    std::vector<std::vector<std::vector<int>>> gtrans;
    for (int s = 0; s < static_cast<int>(gba.size()); ++s) {
        gtrans.resize(gba.size());
        gtrans[s].assign(num_letters, {});
        std::uint32_t m = gba[s];
        std::uint32_t oblig = obligations(m);
        for (Letter letter = 0; letter < static_cast<Letter>(num_letters); ++letter) {
            if (!letter_ok(m, letter)) continue;
            for (std::uint32_t t : all)
                if ((t & oblig) == oblig) gtrans[s][letter].push_back(intern(t));
        }
    }
    gtrans.resize(gba.size());
    for (auto& row : gtrans)
        if (row.empty()) row.assign(num_letters, {});

    // Acceptance sets, one per Until in the closure.
    std::vector<int> untils;
    for (int i = 0; i < c; ++i)
        if (cl[i]->kind == Ltl::Kind::Until) untils.push_back(i);
    int k = static_cast<int>(untils.size());

    Nba nba;
    nba.num_atoms = num_atoms;
    if (k == 0) {
        nba.num_states = static_cast<int>(gba.size());
        nba.initial = initials;
        nba.accepting.assign(gba.size(), true);
        nba.trans = std::move(gtrans);
        return nba;
    }

    // Counter degeneralization: advance past index i when the current state
    // fulfils F_i (until absent or right argument present).
    auto in_f = [&](int s, int i) {
        std::uint32_t m = gba[s];
        int u = untils[i];
        return !((m >> u) & 1) || ((m >> idx(cl[u]->rhs)) & 1);
    };
    nba.num_states = static_cast<int>(gba.size()) * k;
    auto enc = [&](int s, int i) { return s * k + i; };
    nba.trans.assign(nba.num_states, std::vector<std::vector<int>>(num_letters));
    nba.accepting.assign(nba.num_states, false);
    for (int s = 0; s < static_cast<int>(gba.size()); ++s) {
        for (int i = 0; i < k; ++i) {
            int next_i = in_f(s, i) ? (i + 1) % k : i;
            if (i == k - 1 && in_f(s, i)) nba.accepting[enc(s, i)] = true;
            for (int letter = 0; letter < num_letters; ++letter)
                for (int t : gtrans[s][letter])
                    nba.trans[enc(s, i)][letter].push_back(enc(t, next_i));
        }
    }
    for (int s0 : initials) nba.initial.push_back(enc(s0, 0));
    return nba;
}

// ---------------------------------------------------------------------------
// Safra determinization
// ---------------------------------------------------------------------------

namespace {

struct SNode {
    int name;
    bool mark;
    std::vector<int> label;  // sorted NBA states
    std::vector<SNode> kids;
};

using STree = std::vector<SNode>;  // zero or one root

void serialize(const SNode& n, std::string& out) {
    out += "(" + std::to_string(n.name) + (n.mark ? "!" : "") + "[";
    for (std::size_t i = 0; i < n.label.size(); ++i) {
        if (i) out += ",";
        out += std::to_string(n.label[i]);
    }
    out += "]";
    for (const auto& kid : n.kids) serialize(kid, out);
    out += ")";
}

std::string serialize(const STree& t) {
    std::string out;
    for (const auto& n : t) serialize(n, out);
    return out;
}

void used_names(const SNode& n, std::set<int>& names) {
    names.insert(n.name);
    for (const auto& kid : n.kids) used_names(kid, names);
}

void clear_marks(SNode& n) {
    n.mark = false;
    for (auto& kid : n.kids) clear_marks(kid);
}

std::vector<int> set_intersect(const std::vector<int>& a, const std::vector<bool>& in) {
    std::vector<int> out;
    for (int x : a)
        if (in[x]) out.push_back(x);
    return out;
}

// Create a youngest child holding label & F for every node of the old tree.
void spawn(SNode& n, const std::vector<bool>& acc, int& next_name,
           const std::set<int>& taken) {
    std::size_t old_kids = n.kids.size();
    for (std::size_t i = 0; i < old_kids; ++i) spawn(n.kids[i], acc, next_name, taken);
    std::vector<int> f = set_intersect(n.label, acc);
    if (f.empty()) return;
    while (taken.count(next_name)) ++next_name;
    n.kids.push_back({next_name++, false, std::move(f), {}});
}

void powerset(SNode& n, const Nba& nba, Letter letter) {
    std::set<int> succ;
    for (int q : n.label)
        for (int t : nba.trans[q][letter]) succ.insert(t);
    n.label.assign(succ.begin(), succ.end());
    for (auto& kid : n.kids) powerset(kid, nba, letter);
}

void remove_states(SNode& n, const std::set<int>& forbidden) {
    std::vector<int> keep;
    for (int q : n.label)
        if (!forbidden.count(q)) keep.push_back(q);
    n.label = std::move(keep);
    for (auto& kid : n.kids) remove_states(kid, forbidden);
}

void horizontal_merge(SNode& n) {
    std::set<int> claimed;
    for (auto& kid : n.kids) {
        remove_states(kid, claimed);
        claimed.insert(kid.label.begin(), kid.label.end());
        horizontal_merge(kid);
    }
}

void drop_empty(std::vector<SNode>& kids) {
    std::vector<SNode> keep;
    for (auto& kid : kids) {
        if (kid.label.empty()) continue;
        drop_empty(kid.kids);
        keep.push_back(std::move(kid));
    }
    kids = std::move(keep);
}

void vertical_merge(SNode& n) {
    for (auto& kid : n.kids) vertical_merge(kid);
    std::set<int> u;
    for (const auto& kid : n.kids) u.insert(kid.label.begin(), kid.label.end());
    if (!n.kids.empty() && std::vector<int>(u.begin(), u.end()) == n.label) {
        n.kids.clear();
        n.mark = true;
    }
}

STree safra_step(const STree& t, const Nba& nba, Letter letter) {
    STree out = t;
    std::set<int> taken;
    for (auto& n : out) {
        clear_marks(n);
        used_names(n, taken);
    }
    int next_name = 1;
    for (auto& n : out) spawn(n, nba.accepting, next_name, taken);
    for (auto& n : out) powerset(n, nba, letter);
    // Sibling-order merge also applies at the (single-root) top level.
    std::set<int> claimed;
    for (auto& n : out) {
        remove_states(n, claimed);
        claimed.insert(n.label.begin(), n.label.end());
        horizontal_merge(n);
    }
    drop_empty(out);
    for (auto& n : out) vertical_merge(n);
    return out;
}

void names_in(const SNode& n, std::set<int>& present, std::set<int>& marked) {
    present.insert(n.name);
    if (n.mark) marked.insert(n.name);
    for (const auto& kid : n.kids) names_in(kid, present, marked);
}

}  // namespace

Dra nba_to_dra(const Nba& nba, std::size_t budget) {
    int num_letters = 1 << nba.num_atoms;
    STree init_tree;
    {
        std::set<int> init(nba.initial.begin(), nba.initial.end());
        if (!init.empty())
            init_tree.push_back({1, false, std::vector<int>(init.begin(), init.end()), {}});
    }

    std::map<std::string, int> index;
    std::vector<STree> trees;
    auto intern = [&](STree t) {
        std::string key = serialize(t);
        auto it = index.find(key);
        if (it != index.end()) return it->second;
        if (trees.size() >= budget)
            throw StateBudgetExceededError("Rabin determinization exceeded its budget",
                                           budget);
        int id = static_cast<int>(trees.size());
        index[key] = id;
        trees.push_back(std::move(t));
        return id;
    };

    Dra dra;
    dra.num_atoms = nba.num_atoms;
    dra.initial = intern(init_tree);
    for (int s = 0; s < static_cast<int>(trees.size()); ++s) {
        dra.trans.resize(trees.size());
        STree cur = trees[s];
        dra.trans[s].assign(num_letters, 0);
        for (Letter letter = 0; letter < static_cast<Letter>(num_letters); ++letter)
            dra.trans[s][letter] = intern(safra_step(cur, nba, letter));
    }
    dra.trans.resize(trees.size());
    for (auto& row : dra.trans)
        if (row.empty()) row.assign(num_letters, 0);
    dra.num_states = static_cast<int>(trees.size());

    // Rabin pairs per node name that is ever marked.
    std::vector<std::set<int>> present(trees.size()), marked(trees.size());
    std::set<int> all_marked;
    for (std::size_t i = 0; i < trees.size(); ++i) {
        for (const auto& n : trees[i]) names_in(n, present[i], marked[i]);
        all_marked.insert(marked[i].begin(), marked[i].end());
    }
    for (int name : all_marked) {
        Dra::RabinPair pair;
        pair.avoid.resize(trees.size());
        pair.repeat.resize(trees.size());
        for (std::size_t i = 0; i < trees.size(); ++i) {
            pair.avoid[i] = !present[i].count(name);
            pair.repeat[i] = marked[i].count(name) > 0;
        }
        dra.pairs.push_back(std::move(pair));
    }
    return dra;
}

// ---------------------------------------------------------------------------
// Lasso acceptance
// ---------------------------------------------------------------------------

bool nba_accepts_lasso(const Nba& nba, const std::vector<Letter>& prefix,
                       const std::vector<Letter>& period) {
    std::vector<Letter> w = prefix;
    w.insert(w.end(), period.begin(), period.end());
    int n = static_cast<int>(w.size());
    int p = static_cast<int>(prefix.size());
    auto succ_pos = [&](int i) { return i + 1 < n ? i + 1 : p; };
    auto enc = [&](int q, int i) { return q * n + i; };

    std::vector<bool> reach(static_cast<std::size_t>(nba.num_states) * n, false);
    std::vector<int> stack;
    for (int q0 : nba.initial) {
        if (!reach[enc(q0, 0)]) {
            reach[enc(q0, 0)] = true;
            stack.push_back(enc(q0, 0));
        }
    }
    while (!stack.empty()) {
        int node = stack.back();
        stack.pop_back();
        int q = node / n, i = node % n;
        for (int t : nba.trans[q][w[i]]) {
            int e = enc(t, succ_pos(i));
            if (!reach[e]) { reach[e] = true; stack.push_back(e); }
        }
    }
    // A reachable accepting node in the period that can return to itself.
    for (int q = 0; q < nba.num_states; ++q) {
        if (!nba.accepting[q]) continue;
        for (int i = p; i < n; ++i) {
            if (!reach[enc(q, i)]) continue;
            std::vector<bool> seen(static_cast<std::size_t>(nba.num_states) * n, false);
            std::vector<int> st;
            for (int t : nba.trans[q][w[i]]) {
                int e = enc(t, succ_pos(i));
                if (!seen[e]) { seen[e] = true; st.push_back(e); }
            }
            while (!st.empty()) {
                int node = st.back();
                st.pop_back();
                if (node == enc(q, i)) return true;
                int q2 = node / n, i2 = node % n;
                for (int t : nba.trans[q2][w[i2]]) {
                    int e = enc(t, succ_pos(i2));
                    if (!seen[e]) { seen[e] = true; st.push_back(e); }
                }
            }
            if (seen[enc(q, i)]) return true;
        }
    }
    return false;
}

bool dra_accepts_lasso(const Dra& dra, const std::vector<Letter>& prefix,
                       const std::vector<Letter>& period) {
    int q = dra.initial;
    for (Letter a : prefix) q = dra.trans[q][a];
    // Iterate the period until the boundary state recurs.
    std::map<int, int> first_seen;
    std::vector<int> boundary;
    std::vector<std::vector<int>> visited_per_round;
    while (!first_seen.count(q)) {
        first_seen[q] = static_cast<int>(boundary.size());
        boundary.push_back(q);
        std::vector<int> visited;
        for (Letter a : period) {
            visited.push_back(q);
            q = dra.trans[q][a];
        }
        visited_per_round.push_back(std::move(visited));
    }
    int start = first_seen[q];
    std::set<int> cycle;
    for (std::size_t r = start; r < visited_per_round.size(); ++r)
        cycle.insert(visited_per_round[r].begin(), visited_per_round[r].end());
    for (const auto& pair : dra.pairs) {
        bool hits_avoid = false, hits_repeat = false;
        for (int s : cycle) {
            if (pair.avoid[s]) hits_avoid = true;
            if (pair.repeat[s]) hits_repeat = true;
        }
        if (!hits_avoid && hits_repeat) return true;
    }
    return false;
}

void dra_export(const Dra& d, std::ostream& out) {
    out << "states " << d.num_states << "\n";
    out << "alphabet " << (1 << d.num_atoms) << "\n";
    out << "initial " << d.initial << "\n";
    for (int s = 0; s < d.num_states; ++s)
        for (int a = 0; a < (1 << d.num_atoms); ++a)
            out << "trans " << s << " " << a << " " << d.trans[s][a] << "\n";
    for (std::size_t i = 0; i < d.pairs.size(); ++i) {
        out << "pair " << i << " avoid";
        for (int s = 0; s < d.num_states; ++s)
            if (d.pairs[i].avoid[s]) out << " " << s;
        out << " repeat";
        for (int s = 0; s < d.num_states; ++s)
            if (d.pairs[i].repeat[s]) out << " " << s;
        out << "\n";
    }
}

// ---------------------------------------------------------------------------
// End components and the product analysis
// ---------------------------------------------------------------------------

namespace {

// Kosaraju SCC over the graph of `alive` states restricted to choices whose
// successors are all alive.
std::vector<int> scc_of(const SimpleMdp& m, const std::vector<bool>& alive,
                        const std::vector<std::vector<int>>& allowed) {
    int n = static_cast<int>(m.size());
    std::vector<std::vector<int>> fwd(n), bwd(n);
    for (int s = 0; s < n; ++s) {
        if (!alive[s]) continue;
        for (int c : allowed[s])
            for (const auto& [t, p] : m[s][c]) {
                fwd[s].push_back(t);
                bwd[t].push_back(s);
            }
    }
    std::vector<int> order;
    std::vector<bool> seen(n, false);
    for (int s0 = 0; s0 < n; ++s0) {
        if (seen[s0] || !alive[s0]) continue;
        // Iterative post-order.
        std::vector<std::pair<int, std::size_t>> st{{s0, 0}};
        seen[s0] = true;
        while (!st.empty()) {
            auto& [s, i] = st.back();
            if (i < fwd[s].size()) {
                int t = fwd[s][i++];
                if (!seen[t] && alive[t]) { seen[t] = true; st.push_back({t, 0}); }
            } else {
                order.push_back(s);
                st.pop_back();
            }
        }
    }
    std::vector<int> comp(n, -1);
    int nc = 0;
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        if (comp[*it] >= 0) continue;
        std::vector<int> st{*it};
        comp[*it] = nc;
        while (!st.empty()) {
            int s = st.back();
            st.pop_back();
            for (int t : bwd[s])
                if (alive[t] && comp[t] < 0) { comp[t] = nc; st.push_back(t); }
        }
        ++nc;
    }
    return comp;
}

}  // namespace

std::vector<std::vector<int>> max_end_components(const SimpleMdp& m,
                                                 std::vector<bool> alive) {
    int n = static_cast<int>(m.size());
    // The allowed choice sets only ever shrink, so the loop terminates.
    std::vector<std::vector<int>> allowed(n);
    for (int s = 0; s < n; ++s) {
        if (!alive[s]) continue;
        for (int c = 0; c < static_cast<int>(m[s].size()); ++c) allowed[s].push_back(c);
    }
    bool changed = true;
    while (changed) {
        changed = false;
        for (int s = 0; s < n; ++s) {
            if (!alive[s]) continue;
            std::vector<int> keep;
            for (int c : allowed[s]) {
                bool in = true;
                for (const auto& [t, p] : m[s][c])
                    if (!alive[t]) { in = false; break; }
                if (in) keep.push_back(c);
            }
            if (keep.size() != allowed[s].size()) changed = true;
            allowed[s] = std::move(keep);
            if (allowed[s].empty()) { alive[s] = false; changed = true; }
        }
        if (changed) continue;
        std::vector<int> comp = scc_of(m, alive, allowed);
        for (int s = 0; s < n; ++s) {
            if (!alive[s]) continue;
            std::vector<int> keep;
            for (int c : allowed[s]) {
                bool in = true;
                for (const auto& [t, p] : m[s][c])
                    if (comp[t] != comp[s]) { in = false; break; }
                if (in) keep.push_back(c);
            }
            if (keep.size() != allowed[s].size()) changed = true;
            allowed[s] = std::move(keep);
            if (allowed[s].empty()) { alive[s] = false; }
        }
    }
    std::vector<int> comp = scc_of(m, alive, allowed);
    std::map<int, std::vector<int>> groups;
    for (int s = 0; s < n; ++s)
        if (alive[s]) groups[comp[s]].push_back(s);
    std::vector<std::vector<int>> out;
    for (auto& [c, states] : groups) out.push_back(std::move(states));
    return out;
}

namespace {

struct OmegaProduct {
    SimpleMdp mdp;
    std::vector<int> dra_state;  // per product state
    int start = 0;
};

OmegaProduct build_product(const SimpleMdp& m, const Dra& d,
                           const std::vector<Letter>& state_letter, int from,
                           std::size_t budget) {
    OmegaProduct prod;
    std::map<std::pair<int, int>, int> index;
    std::vector<std::pair<int, int>> states;
    auto intern = [&](int s, int q) {
        auto it = index.find({s, q});
        if (it != index.end()) return it->second;
        if (states.size() >= budget)
            throw StateBudgetExceededError("omega product exceeded its budget", budget);
        int id = static_cast<int>(states.size());
        index[{s, q}] = id;
        states.emplace_back(s, q);
        prod.dra_state.push_back(q);
        return id;
    };
    prod.start = intern(from, d.initial);
    for (int cur = 0; cur < static_cast<int>(states.size()); ++cur) {
        auto [s, q] = states[cur];
        int q2 = d.trans[q][state_letter[s]];
        prod.mdp.resize(states.size());
        std::vector<std::vector<std::pair<int, Rational>>> rows;
        for (const auto& row : m[s]) {
            SimpleRow prow;
            for (const auto& [t, p] : row) prow.emplace_back(intern(t, q2), p);
            std::sort(prow.begin(), prow.end());
            rows.push_back(std::move(prow));
        }
        prod.mdp.resize(states.size());
        prod.mdp[cur] = std::move(rows);
    }
    prod.mdp.resize(states.size());
    return prod;
}

// States inside end components where some Rabin pair is satisfiable.
std::vector<bool> rabin_good_states(const OmegaProduct& prod, const Dra& d) {
    int n = static_cast<int>(prod.mdp.size());
    std::vector<bool> good(n, false);
    auto mecs = max_end_components(prod.mdp, std::vector<bool>(n, true));
    for (const auto& mec : mecs) {
        for (const auto& pair : d.pairs) {
            std::vector<bool> alive(n, false);
            for (int s : mec)
                if (!pair.avoid[prod.dra_state[s]]) alive[s] = true;
            for (const auto& sub : max_end_components(prod.mdp, alive)) {
                bool has_repeat = false;
                for (int s : sub)
                    if (pair.repeat[prod.dra_state[s]]) { has_repeat = true; break; }
                if (has_repeat)
                    for (int s : sub) good[s] = true;
            }
        }
    }
    return good;
}

// States inside end components satisfying the complement (Streett)
// condition of every pair: visiting F_i infinitely forces visiting E_i.
void streett_mark(const OmegaProduct& prod, const Dra& d, const std::vector<int>& ec,
                  std::vector<bool>& good) {
    int n = static_cast<int>(prod.mdp.size());
    std::vector<int> violating;
    for (std::size_t i = 0; i < d.pairs.size(); ++i) {
        bool has_avoid = false, has_repeat = false;
        for (int s : ec) {
            if (d.pairs[i].avoid[prod.dra_state[s]]) has_avoid = true;
            if (d.pairs[i].repeat[prod.dra_state[s]]) has_repeat = true;
        }
        if (!has_avoid && has_repeat) violating.push_back(static_cast<int>(i));
    }
    if (violating.empty()) {
        for (int s : ec) good[s] = true;
        return;
    }
    std::vector<bool> alive(n, false);
    for (int s : ec) {
        bool drop = false;
        for (int i : violating)
            if (d.pairs[i].repeat[prod.dra_state[s]]) { drop = true; break; }
        if (!drop) alive[s] = true;
    }
    for (const auto& sub : max_end_components(prod.mdp, alive))
        streett_mark(prod, d, sub, good);
}

}  // namespace

Prob mdp_omega_simple(const SimpleMdp& m, const Dra& d,
                      const std::vector<Letter>& state_letter, int from,
                      Optimize mode, std::size_t budget) {
    OmegaProduct prod = build_product(m, d, state_letter, from, budget);
    int n = static_cast<int>(prod.mdp.size());
    UntilObjective obj;
    obj.safe.assign(n, true);
    if (mode == Optimize::Max) {
        std::vector<bool> good = rabin_good_states(prod, d);
        obj.target.assign(good.begin(), good.end());
        return Prob(solve_mdp(prod.mdp, obj, Optimize::Max)[prod.start]);
    }
    // min Pr(Rabin) = 1 - max Pr(complement); the complement is a Streett
    // condition decided by recursive end-component analysis.
    std::vector<bool> good(n, false);
    for (const auto& mec : max_end_components(prod.mdp, std::vector<bool>(n, true)))
        streett_mark(prod, d, mec, good);
    obj.target.assign(good.begin(), good.end());
    return Prob(1 - solve_mdp(prod.mdp, obj, Optimize::Max)[prod.start]);
}

Prob mdp_omega(const Mdp& mdp, const Dra& d, const std::vector<Letter>& state_letter,
               int from, Optimize mode, std::size_t budget) {
    return mdp_omega_simple(simple_view(mdp), d, state_letter, from, mode, budget);
}

}  // namespace natpatl
