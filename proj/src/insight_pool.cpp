#include "hifo/insight_pool.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

namespace hifo {

namespace {

std::set<std::string> word_tokens(const std::string& text) {
    std::set<std::string> tokens;
    std::string cur;
    for (unsigned char c : text) {
        if (std::isalnum(c)) {
            cur.push_back(static_cast<char>(std::tolower(c)));
        } else if (!cur.empty()) {
            tokens.insert(cur);
            cur.clear();
        }
    }
    if (!cur.empty()) tokens.insert(cur);
    return tokens;
}

}  // namespace

InsightPool::InsightPool(InsightPoolConfig cfg) : cfg_(cfg) {
    if (cfg_.capacity < 1) throw std::invalid_argument("InsightPool: capacity must be >= 1");
}

const std::vector<std::string>& InsightPool::seed_texts() {
    static const std::vector<std::string> texts = {
        "Design adaptive hybrid meta-heuristics synergistically fusing multiple search "
        "paradigms and dynamically tune operator parameters based on search stage or "
        "problem features.",
        "Employ machine learning to mine problem structures and use learned insights to "
        "intelligently bias towards promising search regions.",
        "Explore objective function engineering by introducing auxiliary objectives or "
        "dynamically adjusting weights to reshape the search landscape.",
        "Construct problem-specialized solution representations and co-design dedicated "
        "operators to fully leverage the representation's structure.",
        "Implement intelligent diversification based on solution feature space analysis "
        "to systematically target uncovered regions and escape local optima.",
    };
    return texts;
}

void InsightPool::seed(int generation) {
    if (!members_.empty()) throw std::logic_error("InsightPool::seed: pool is not empty");
    for (const std::string& text : seed_texts()) {
        Insight k;
        k.id = fresh_id();
        k.text = text;
        k.created_gen = generation;
        k.is_seed = true;
        members_.push_back(std::move(k));
    }
}

double InsightPool::jaccard_similarity(const std::string& a, const std::string& b) {
    const std::set<std::string> ta = word_tokens(a);
    const std::set<std::string> tb = word_tokens(b);
    if (ta.empty() && tb.empty()) return 1.0;
    std::size_t inter = 0;
    for (const std::string& t : ta) inter += tb.count(t);
    const std::size_t uni = ta.size() + tb.size() - inter;
    return static_cast<double>(inter) / static_cast<double>(uni);
}

AdmissionResult InsightPool::admit(const std::string& text, int generation) {
    AdmissionResult r;
    for (const Insight& k : members_) {
        const double sim = jaccard_similarity(text, k.text);
        if (sim > r.max_similarity || r.nearest_id.empty()) {
            r.max_similarity = sim;
            r.nearest_id = k.id;
        }
    }
    if (!members_.empty() && r.max_similarity >= cfg_.jaccard_threshold) return r;

    Insight k;
    k.id = fresh_id();
    k.text = text;
    k.created_gen = generation;
    members_.push_back(std::move(k));
    r.admitted = true;
    r.id = members_.back().id;
    return r;
}

double InsightPool::utility(const Insight& k, int generation) const {
    double u = k.effectiveness - cfg_.usage_penalty * std::log(k.usage_count + 1.0);
    if (k.last_success_gen && generation - *k.last_success_gen <= cfg_.recency_window)
        u += cfg_.recency_bonus;
    return u;
}

std::vector<Insight> InsightPool::retrieve(int generation) {
    std::vector<std::size_t> order(members_.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    std::vector<double> util(members_.size());
    for (std::size_t i = 0; i < members_.size(); ++i) util[i] = utility(members_[i], generation);

    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (util[a] != util[b]) return util[a] > util[b];
        if (members_[a].usage_count != members_[b].usage_count)
            return members_[a].usage_count < members_[b].usage_count;
        if (members_[a].created_gen != members_[b].created_gen)
            return members_[a].created_gen < members_[b].created_gen;
        return members_[a].id < members_[b].id;
    });

    const std::size_t take = std::min<std::size_t>(cfg_.select_count, order.size());
    std::vector<Insight> out;
    out.reserve(take);
    for (std::size_t i = 0; i < take; ++i) {
        Insight& k = members_[order[i]];
        k.usage_count += 1;
        k.last_used_gen = generation;
        out.push_back(k);
    }
    return out;
}

double InsightPool::normalized_score(double g_new, double g_best, double g_worst) {
    if (g_worst == g_best) return g_new <= g_best ? 1.0 : 0.0;
    const double rho = (g_worst - g_new) / (g_worst - g_best);
    return std::clamp(rho, -1.0, 2.0);
}

double InsightPool::credit_signal(double g_new, double g_best, double g_avg, double g_worst) {
    const double rho = normalized_score(g_new, g_best, g_worst);
    if (g_new <= g_best) return 0.8 + 0.2 * rho;
    if (g_new <= g_avg) return 0.2 + 0.6 * rho;
    return -0.3 + 0.5 * rho;
}

CreditResult InsightPool::apply_credit(std::span<const std::string> ids, double signal,
                                       int generation) {
    CreditResult r;
    for (const std::string& id : ids) {
        auto it = std::find_if(members_.begin(), members_.end(),
                               [&](const Insight& k) { return k.id == id; });
        if (it == members_.end()) {
            r.unknown.push_back(id);
            continue;
        }
        it->effectiveness = (1.0 - cfg_.ema_rate) * it->effectiveness + cfg_.ema_rate * signal;
        if (signal > 0.0) it->last_success_gen = generation;
        r.updated.push_back(id);
    }
    return r;
}

double InsightPool::eviction_score(const Insight& k, int generation) const {
    const int last = k.last_used_gen.value_or(k.created_gen);
    return k.effectiveness - cfg_.decay_rate * (generation - last);
}

std::vector<EvictionRecord> InsightPool::prune(int generation) {
    std::vector<EvictionRecord> evicted;
    while (members_.size() > static_cast<std::size_t>(cfg_.capacity)) {
        auto better = [&](std::size_t a, std::size_t b) {
            const double sa = eviction_score(members_[a], generation);
            const double sb = eviction_score(members_[b], generation);
            if (sa != sb) return sa < sb;
            if (members_[a].created_gen != members_[b].created_gen)
                return members_[a].created_gen < members_[b].created_gen;
            return members_[a].id < members_[b].id;
        };
        std::optional<std::size_t> victim;
        for (std::size_t i = 0; i < members_.size(); ++i) {
            if (members_[i].usage_count < cfg_.grace_usage) continue;
            if (!victim || better(i, *victim)) victim = i;
        }
        bool grace_override = false;
        if (!victim) {
            grace_override = true;
            victim = 0;
            for (std::size_t i = 1; i < members_.size(); ++i)
                if (better(i, *victim)) victim = i;
        }
        const Insight& k = members_[*victim];
        evicted.push_back({k.id, k.text, eviction_score(k, generation), grace_override});
        members_.erase(members_.begin() + static_cast<std::ptrdiff_t>(*victim));
    }
    return evicted;
}

const Insight* InsightPool::find(const std::string& id) const {
    auto it = std::find_if(members_.begin(), members_.end(),
                           [&](const Insight& k) { return k.id == id; });
    return it == members_.end() ? nullptr : &*it;
}

void InsightPool::restore(std::vector<Insight> members, int next_id) {
    members_ = std::move(members);
    next_id_ = next_id;
}

std::string InsightPool::fresh_id() {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "k%04d", next_id_++);
    return buf;
}

}  // namespace hifo
