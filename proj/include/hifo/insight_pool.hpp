#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace hifo {

// A reusable design principle mined from successful heuristics. Raw text is
// what reaches prompts; the bookkeeping fields drive retrieval, credit and
// eviction.
struct Insight {
    std::string id;
    std::string text;
    double effectiveness = 0.5;  // EMA of credit signals
    int usage_count = 0;
    std::optional<int> last_used_gen;
    std::optional<int> last_success_gen;
    int created_gen = 0;
    bool is_seed = false;
};

struct InsightPoolConfig {
    int capacity = 30;              // hard size cap
    double jaccard_threshold = 0.7; // admission novelty gate
    int select_count = 3;           // insights retrieved per prompt
    double usage_penalty = 0.1;     // weight on log(usage + 1) in utility
    double recency_bonus = 0.2;     // added while a recent success is in window
    int recency_window = 2;         // generations a success stays "recent"
    double ema_rate = 0.3;          // credit smoothing factor
    double decay_rate = 0.01;       // staleness penalty per idle generation
    int grace_usage = 3;            // evict only insights used at least this often
};

struct AdmissionResult {
    bool admitted = false;
    std::string id;          // empty when rejected
    double max_similarity = 0.0;
    std::string nearest_id;  // closest existing member, if any
};

struct EvictionRecord {
    std::string id;
    std::string text;
    double score = 0.0;
    bool grace_override = false;  // true when every member was grace-protected
};

struct CreditResult {
    std::vector<std::string> updated;
    std::vector<std::string> unknown;  // ids not present in the pool
};

class InsightPool {
public:
    explicit InsightPool(InsightPoolConfig cfg = {});

    // Populates an empty pool with the built-in generic principles.
    // Throws if the pool already has members.
    void seed(int generation = 0);

    static const std::vector<std::string>& seed_texts();

    // Jaccard similarity of the lowercase alphanumeric word-token sets.
    // Both-empty counts as identical (1.0).
    static double jaccard_similarity(const std::string& a, const std::string& b);

    // Admits `text` iff its similarity to every member is strictly below the
    // threshold. New members start at effectiveness 0.5, usage 0.
    AdmissionResult admit(const std::string& text, int generation);

    // Retrieval utility: effectiveness - w_u * ln(usage + 1) + recency bonus.
    double utility(const Insight& k, int generation) const;

    // Top select_count members by utility (ties: lower usage, then older,
    // then id). Each returned insight has usage_count bumped and its last
    // use stamped with `generation`.
    std::vector<Insight> retrieve(int generation);

    // Relative improvement of g_new against the generation's spread,
    // clamped to [-1, 2]. Degenerate spread maps to 1 or 0.
    static double normalized_score(double g_new, double g_best, double g_worst);

    // Tiered credit signal in [-0.8, 1.2]: which band g_new falls in
    // (beats best / beats average / worse than average) sets the tier.
    static double credit_signal(double g_new, double g_best, double g_avg, double g_worst);

    // EMA update of effectiveness for each contributing insight; positive
    // signals also stamp last_success_gen.
    CreditResult apply_credit(std::span<const std::string> ids, double signal, int generation);

    // Eviction score: effectiveness minus decay for idle generations
    // (never-used insights idle since creation).
    double eviction_score(const Insight& k, int generation) const;

    // Evicts lowest-score members until the pool fits capacity. Prefers
    // members past the usage grace threshold; falls back to the overall
    // minimum when every member is still protected.
    std::vector<EvictionRecord> prune(int generation);

    const std::vector<Insight>& members() const { return members_; }
    const Insight* find(const std::string& id) const;
    const InsightPoolConfig& config() const { return cfg_; }
    std::size_t size() const { return members_.size(); }
    bool empty() const { return members_.empty(); }

    // Restores a snapshot (used by replay and tests).
    void restore(std::vector<Insight> members, int next_id);
    int next_id() const { return next_id_; }

private:
    std::string fresh_id();

    InsightPoolConfig cfg_;
    std::vector<Insight> members_;
    int next_id_ = 1;
};

}  // namespace hifo
