#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace rsma {

enum class Scheme { RSMA, SDMA, NOMA };

std::string scheme_name(Scheme s);

// A transmit stream is either private to one user or common to a set of
// users that must all decode it. Streams are ordered: privates first (one
// per user, in user order), then the common stream if the scheme has one.
struct Stream {
  bool is_common = false;
  int owner = -1;                 // private streams only
  std::vector<int> decoded_by;    // common streams only, ascending user ids
};

class StreamPlan {
 public:
  StreamPlan() = default;  // empty placeholder; build real plans below

  static StreamPlan rsma(int user_count);
  static StreamPlan sdma(int user_count);
  // strong_user decodes the common (weak user's) stream first and cancels
  // it; its own stream is the only private one kept after SIC interference
  // accounting. Two users only.
  static StreamPlan noma(int strong_user);

  Scheme scheme() const { return scheme_; }
  int user_count() const { return user_count_; }
  int stream_count() const { return static_cast<int>(streams_.size()); }
  const std::vector<Stream>& streams() const { return streams_; }

  int private_stream_index(int user) const;
  // -1 when the plan has no common stream (SDMA).
  int common_stream_index() const;
  bool has_common() const { return common_stream_index() >= 0; }

  // Users allowed a positive share of the common rate: both under RSMA,
  // only the weak user under NOMA, none under SDMA.
  const std::vector<int>& common_rate_users() const { return common_rate_users_; }

  // Streams the optimizer must hold at zero power. NOMA superposes the
  // weak user's message entirely onto the stream both users decode, so the
  // weak user's own column stays dark; other schemes pin nothing.
  const std::vector<int>& pinned_zero_streams() const { return pinned_zero_; }

  int noma_strong_user() const { return noma_strong_; }

 private:
  Scheme scheme_ = Scheme::SDMA;
  int user_count_ = 0;
  std::vector<Stream> streams_;
  std::vector<int> common_rate_users_;
  std::vector<int> pinned_zero_;
  int noma_strong_ = -1;
};

// DC-biased amplitude precoder. columns is L x S: one row per fixture, one
// column per stream in plan order. Feasibility is a per-row L1 budget:
// sum_s |columns(l, s)| <= amplitude_budget for every row l, where the
// budget derives from the bias as min(dc_bias, p_max - dc_bias) when p_max
// is present and equals dc_bias otherwise.
struct Precoder {
  Eigen::MatrixXd columns;
  double amplitude_budget = 0.0;
  std::optional<double> p_max;

  static Precoder from_budget(Eigen::MatrixXd columns, double budget);
  static Precoder from_bias(Eigen::MatrixXd columns, double dc_bias, double p_max);
};

// Row L1 norms within budget (scaled slack for accumulated rounding).
bool check_feasible(const Precoder& p);

// Per-user rate breakdown at a fixed precoder and common-rate split.
struct RateReport {
  Eigen::VectorXd common_sinr;     // per decoding user; 0 where not decoded
  Eigen::VectorXd private_sinr;
  double achievable_common_rate = 0.0;  // min over decoders; 0 without common
  Eigen::VectorXd common_split;    // c_k, sums to <= achievable_common_rate
  Eigen::VectorXd private_rate;
  Eigen::VectorXd overall_rate;    // c_k + private rate
  double wsr = 0.0;
  bool split_clipped = false;      // requested split exceeded the achievable
                                   // common rate and was scaled down
};

// Scalar MMSE equalizer g* = v / T for received signal model
// y = v x + interference + noise with T = v^2 + interference_plus_noise.
double mmse_equalizer(double v, double interference_plus_noise);

// SINR of the common stream at user k: all private streams are interference.
double common_sinr(const Eigen::VectorXd& h, const StreamPlan& plan,
                   const Eigen::MatrixXd& columns, double noise_var);

// SINR of user k's private stream after the scheme's cancellation rules.
double private_sinr(const Eigen::VectorXd& h, int user, const StreamPlan& plan,
                    const Eigen::MatrixXd& columns, double noise_var);

RateReport rate_report(const Eigen::MatrixXd& channel_gains,
                       const StreamPlan& plan, const Precoder& precoder,
                       const Eigen::VectorXd& common_split,
                       const Eigen::VectorXd& weights,
                       const Eigen::VectorXd& noise_vars);

double weighted_sum_rate(const Eigen::VectorXd& weights,
                         const RateReport& report);

}  // namespace rsma
