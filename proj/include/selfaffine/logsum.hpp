#ifndef SELFAFFINE_LOGSUM_HPP
#define SELFAFFINE_LOGSUM_HPP

#include <cmath>
#include <limits>
#include <span>

namespace selfaffine {

// Streaming log-sum-exp: accumulates log(sum_i exp(x_i)) one term at a time
// without materializing the terms. Rescales against the running maximum, so
// terms far below the current maximum contribute through exp() of a negative
// argument instead of underflowing the sum.
class LogSumExp {
public:
    void add(double log_term) {
        if (std::isinf(log_term) && log_term < 0) return; // exp() == 0
        if (log_term <= max_) {
            sum_ += std::exp(log_term - max_);
        } else {
            if (max_ != -std::numeric_limits<double>::infinity())
                sum_ = sum_ * std::exp(max_ - log_term) + 1.0;
            else
                sum_ = 1.0;
            max_ = log_term;
        }
        ++count_;
    }

    void merge(const LogSumExp& other) {
        if (other.count_ == 0) return;
        if (other.max_ <= max_) {
            sum_ += other.sum_ * std::exp(other.max_ - max_);
        } else {
            if (count_ > 0) sum_ = sum_ * std::exp(max_ - other.max_) + other.sum_;
            else            sum_ = other.sum_;
            max_ = other.max_;
        }
        count_ += other.count_;
    }

    double value() const {
        if (count_ == 0 || sum_ <= 0.0) return -std::numeric_limits<double>::infinity();
        return max_ + std::log(sum_);
    }

    std::size_t count() const { return count_; }

private:
    double max_ = -std::numeric_limits<double>::infinity();
    double sum_ = 0.0;
    std::size_t count_ = 0;
};

inline double log_sum_exp(std::span<const double> xs) {
    LogSumExp acc;
    for (double x : xs) acc.add(x);
    return acc.value();
}

} // namespace selfaffine

#endif
