#include "rsma/streams.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace rsma {

namespace {

// Relative slack absorbs row-sum rounding at large budgets.
double feasibility_slack(double budget) {
  return 1e-12 * std::max(1.0, budget);
}

double stream_gain(const Eigen::VectorXd& h, const Eigen::MatrixXd& columns,
                   int stream) {
  return h.dot(columns.col(stream));
}

// Interference power at the private stage: every private stream except
// `own` (pass own = -1 to keep all, as the common stage sees them).
double private_interference(const Eigen::VectorXd& h, const StreamPlan& plan,
                            const Eigen::MatrixXd& columns, int own) {
  double acc = 0.0;
  for (int user = 0; user < plan.user_count(); ++user) {
    const int s = plan.private_stream_index(user);
    if (s == own) continue;
    const double v = stream_gain(h, columns, s);
    acc += v * v;
  }
  return acc;
}

double rate_of(double sinr) { return std::log2(1.0 + sinr); }

}  // namespace

std::string scheme_name(Scheme s) {
  switch (s) {
    case Scheme::RSMA: return "RSMA";
    case Scheme::SDMA: return "SDMA";
    case Scheme::NOMA: return "NOMA";
  }
  throw std::invalid_argument("scheme_name: unknown scheme");
}

StreamPlan StreamPlan::rsma(int user_count) {
  if (user_count < 2) {
    throw std::invalid_argument("StreamPlan::rsma: needs at least 2 users");
  }
  StreamPlan p;
  p.scheme_ = Scheme::RSMA;
  p.user_count_ = user_count;
  for (int k = 0; k < user_count; ++k) {
    p.streams_.push_back(Stream{false, k, {}});
  }
  Stream common;
  common.is_common = true;
  for (int k = 0; k < user_count; ++k) {
    common.decoded_by.push_back(k);
    p.common_rate_users_.push_back(k);
  }
  p.streams_.push_back(common);
  return p;
}

StreamPlan StreamPlan::sdma(int user_count) {
  if (user_count < 1) {
    throw std::invalid_argument("StreamPlan::sdma: needs at least 1 user");
  }
  StreamPlan p;
  p.scheme_ = Scheme::SDMA;
  p.user_count_ = user_count;
  for (int k = 0; k < user_count; ++k) {
    p.streams_.push_back(Stream{false, k, {}});
  }
  return p;
}

StreamPlan StreamPlan::noma(int strong_user) {
  if (strong_user != 0 && strong_user != 1) {
    throw std::invalid_argument("StreamPlan::noma: strong user must be 0 or 1");
  }
  const int weak = 1 - strong_user;
  StreamPlan p;
  p.scheme_ = Scheme::NOMA;
  p.user_count_ = 2;
  p.streams_.push_back(Stream{false, 0, {}});
  p.streams_.push_back(Stream{false, 1, {}});
  Stream common;
  common.is_common = true;
  common.decoded_by = {0, 1};
  p.streams_.push_back(common);
  p.common_rate_users_ = {weak};
  p.pinned_zero_ = {weak};  // weak's private column stays dark
  p.noma_strong_ = strong_user;
  return p;
}

int StreamPlan::private_stream_index(int user) const {
  if (user < 0 || user >= user_count_) {
    throw std::out_of_range("StreamPlan::private_stream_index: bad user");
  }
  return user;  // privates lead, in user order
}

int StreamPlan::common_stream_index() const {
  const int last = stream_count() - 1;
  if (last >= 0 && streams_[last].is_common) return last;
  return -1;
}

Precoder Precoder::from_budget(Eigen::MatrixXd columns, double budget) {
  if (!(budget > 0.0)) {
    throw std::invalid_argument("Precoder: amplitude budget must be > 0");
  }
  Precoder p;
  p.columns = std::move(columns);
  p.amplitude_budget = budget;
  return p;
}

Precoder Precoder::from_bias(Eigen::MatrixXd columns, double dc_bias,
                             double p_max) {
  if (!(dc_bias > 0.0) || !(p_max > dc_bias)) {
    throw std::invalid_argument("Precoder: need 0 < dc_bias < p_max");
  }
  Precoder p;
  p.columns = std::move(columns);
  p.amplitude_budget = std::min(dc_bias, p_max - dc_bias);
  p.p_max = p_max;
  return p;
}

bool check_feasible(const Precoder& p) {
  if (!(p.amplitude_budget > 0.0)) return false;
  if (!p.columns.allFinite()) return false;
  const double limit = p.amplitude_budget + feasibility_slack(p.amplitude_budget);
  for (Eigen::Index row = 0; row < p.columns.rows(); ++row) {
    if (p.columns.row(row).lpNorm<1>() > limit) return false;
  }
  return true;
}

double mmse_equalizer(double v, double interference_plus_noise) {
  if (!(interference_plus_noise > 0.0)) {
    throw std::domain_error("mmse_equalizer: interference plus noise must be > 0");
  }
  return v / (v * v + interference_plus_noise);
}

double common_sinr(const Eigen::VectorXd& h, const StreamPlan& plan,
                   const Eigen::MatrixXd& columns, double noise_var) {
  const int sc = plan.common_stream_index();
  if (sc < 0) {
    throw std::invalid_argument("common_sinr: plan has no common stream");
  }
  if (!(noise_var > 0.0)) {
    throw std::domain_error("common_sinr: noise variance must be > 0");
  }
  const double v = stream_gain(h, columns, sc);
  const double denom = private_interference(h, plan, columns, -1) + noise_var;
  return v * v / denom;
}

double private_sinr(const Eigen::VectorXd& h, int user, const StreamPlan& plan,
                    const Eigen::MatrixXd& columns, double noise_var) {
  if (!(noise_var > 0.0)) {
    throw std::domain_error("private_sinr: noise variance must be > 0");
  }
  const int own = plan.private_stream_index(user);
  const double v = stream_gain(h, columns, own);
  const double denom = private_interference(h, plan, columns, own) + noise_var;
  return v * v / denom;
}

RateReport rate_report(const Eigen::MatrixXd& channel_gains,
                       const StreamPlan& plan, const Precoder& precoder,
                       const Eigen::VectorXd& common_split,
                       const Eigen::VectorXd& weights,
                       const Eigen::VectorXd& noise_vars) {
  const int users = plan.user_count();
  if (channel_gains.rows() != users) {
    throw std::invalid_argument("rate_report: channel rows != plan users");
  }
  if (precoder.columns.rows() != channel_gains.cols() ||
      precoder.columns.cols() != plan.stream_count()) {
    throw std::invalid_argument("rate_report: precoder shape mismatch");
  }
  if (common_split.size() != users || weights.size() != users ||
      noise_vars.size() != users) {
    throw std::invalid_argument("rate_report: per-user vector length mismatch");
  }
  if (!check_feasible(precoder)) {
    throw std::invalid_argument("rate_report: precoder violates its amplitude budget");
  }
  if ((common_split.array() < 0.0).any()) {
    throw std::invalid_argument("rate_report: common split must be nonnegative");
  }
  const int sc = plan.common_stream_index();
  for (int k = 0; k < users; ++k) {
    if (common_split(k) > 0.0) {
      const auto& allowed = plan.common_rate_users();
      if (std::find(allowed.begin(), allowed.end(), k) == allowed.end()) {
        throw std::invalid_argument(
            "rate_report: common split assigned to a user the scheme excludes");
      }
    }
  }

  RateReport rep;
  rep.common_sinr = Eigen::VectorXd::Zero(users);
  rep.private_sinr = Eigen::VectorXd::Zero(users);
  rep.private_rate = Eigen::VectorXd::Zero(users);
  rep.common_split = common_split;

  for (int k = 0; k < users; ++k) {
    const Eigen::VectorXd h = channel_gains.row(k).transpose();
    rep.private_sinr(k) =
        private_sinr(h, k, plan, precoder.columns, noise_vars(k));
    rep.private_rate(k) = rate_of(rep.private_sinr(k));
  }

  if (sc >= 0) {
    double min_rate = std::numeric_limits<double>::infinity();
    for (int k : plan.streams()[sc].decoded_by) {
      const Eigen::VectorXd h = channel_gains.row(k).transpose();
      rep.common_sinr(k) =
          common_sinr(h, plan, precoder.columns, noise_vars(k));
      min_rate = std::min(min_rate, rate_of(rep.common_sinr(k)));
    }
    rep.achievable_common_rate = min_rate;
  }

  const double requested = rep.common_split.sum();
  if (requested > rep.achievable_common_rate) {
    const double scale =
        requested > 0.0 ? rep.achievable_common_rate / requested : 0.0;
    rep.common_split *= std::max(scale, 0.0);
    rep.split_clipped = true;
  }

  rep.overall_rate = rep.common_split + rep.private_rate;
  rep.wsr = weights.dot(rep.overall_rate);
  return rep;
}

double weighted_sum_rate(const Eigen::VectorXd& weights,
                         const RateReport& report) {
  if (weights.size() != report.overall_rate.size()) {
    throw std::invalid_argument("weighted_sum_rate: length mismatch");
  }
  return weights.dot(report.overall_rate);
}

}  // namespace rsma
