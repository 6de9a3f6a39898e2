#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

namespace uzawa {

/// The dual variable: named channels, each piecewise constant over a fixed
/// number of slots. Values are stored channels x slots.
///
/// The channel list is shared between copies, so signals of the same layout
/// are cheap to create in hot loops.
class PriceSignal {
 public:
  using ChannelList = std::shared_ptr<const std::vector<std::string>>;

  PriceSignal() = default;
  /// Zero signal with the given channels and slot count.
  PriceSignal(std::vector<std::string> channels, std::size_t slots);
  PriceSignal(ChannelList channels, std::size_t slots);
  PriceSignal(ChannelList channels, Eigen::MatrixXd values);

  /// Zero signal with the same layout as `like`.
  static PriceSignal zeros_like(const PriceSignal& like);

  std::size_t channel_count() const noexcept { return static_cast<std::size_t>(values_.rows()); }
  std::size_t slot_count() const noexcept { return static_cast<std::size_t>(values_.cols()); }
  std::size_t size() const noexcept { return static_cast<std::size_t>(values_.size()); }

  const std::vector<std::string>& channels() const;
  const ChannelList& shared_channels() const noexcept { return channels_; }
  /// Index of a named channel; throws std::out_of_range when absent.
  std::size_t channel_index(const std::string& name) const;

  double operator()(std::size_t channel, std::size_t slot) const { return values_(Eigen::Index(channel), Eigen::Index(slot)); }
  double& operator()(std::size_t channel, std::size_t slot) { return values_(Eigen::Index(channel), Eigen::Index(slot)); }

  const Eigen::MatrixXd& values() const noexcept { return values_; }
  Eigen::MatrixXd& values() noexcept { return values_; }

  bool same_layout(const PriceSignal& other) const noexcept;
  bool all_finite() const noexcept { return values_.allFinite(); }

  double squared_norm() const noexcept { return values_.squaredNorm(); }
  double norm() const noexcept { return values_.norm(); }
  /// Euclidean (unweighted) inner product over all entries.
  double dot(const PriceSignal& other) const { return values_.cwiseProduct(other.values_).sum(); }

 private:
  ChannelList channels_;
  Eigen::MatrixXd values_;
};

}  // namespace uzawa
