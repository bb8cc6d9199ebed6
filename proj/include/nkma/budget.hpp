#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <utility>

namespace nkma {

/// Signals that the evaluation budget ran out. Callers treat this as
/// normal termination of a run, not as a failure.
struct BudgetExhausted : std::runtime_error {
    BudgetExhausted() : std::runtime_error("evaluation budget exhausted") {}
};

/// Monotone counter of objective evaluations. Every objective read, full
/// or incremental, costs exactly one unit.
class EvaluationBudget {
public:
    explicit EvaluationBudget(std::uint64_t max_evaluations)
        : max_(max_evaluations) {}

    std::uint64_t used() const { return used_; }
    std::uint64_t max() const { return max_; }
    std::uint64_t remaining() const { return max_ - used_; }
    bool exhausted() const { return used_ >= max_; }

    /// Charges one evaluation. Throws BudgetExhausted if none remain.
    void consume() {
        if (exhausted()) throw BudgetExhausted{};
        ++used_;
    }

    /// Called by the evaluation functions with each paid objective value,
    /// so a run can trace best-so-far per evaluation count.
    using Observer = std::function<void(std::uint64_t used, double fitness)>;
    void set_observer(Observer observer) { observer_ = std::move(observer); }
    void report(double fitness) const {
        if (observer_) observer_(used_, fitness);
    }

private:
    std::uint64_t used_ = 0;
    std::uint64_t max_;
    Observer observer_;
};

}  // namespace nkma
