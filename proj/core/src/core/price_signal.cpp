#include "uzawa/core/price_signal.hpp"

#include <algorithm>
#include <stdexcept>

namespace uzawa {

namespace {
const std::vector<std::string>& empty_channels() {
  static const std::vector<std::string> empty;
  return empty;
}
}  // namespace

PriceSignal::PriceSignal(std::vector<std::string> channels, std::size_t slots)
    : PriceSignal(std::make_shared<const std::vector<std::string>>(std::move(channels)), slots) {}

PriceSignal::PriceSignal(ChannelList channels, std::size_t slots) : channels_(std::move(channels)) {
  if (!channels_) throw std::invalid_argument("price signal: null channel list");
  values_ = Eigen::MatrixXd::Zero(Eigen::Index(channels_->size()), Eigen::Index(slots));
}

PriceSignal::PriceSignal(ChannelList channels, Eigen::MatrixXd values)
    : channels_(std::move(channels)), values_(std::move(values)) {
  if (!channels_) throw std::invalid_argument("price signal: null channel list");
  if (values_.rows() != Eigen::Index(channels_->size())) {
    throw std::invalid_argument("price signal: row count must equal channel count");
  }
}

PriceSignal PriceSignal::zeros_like(const PriceSignal& like) {
  return PriceSignal(like.channels_, like.slot_count());
}

const std::vector<std::string>& PriceSignal::channels() const {
  return channels_ ? *channels_ : empty_channels();
}

std::size_t PriceSignal::channel_index(const std::string& name) const {
  const auto& ch = channels();
  auto it = std::find(ch.begin(), ch.end(), name);
  if (it == ch.end()) throw std::out_of_range("price signal: no channel '" + name + "'");
  return static_cast<std::size_t>(it - ch.begin());
}

bool PriceSignal::same_layout(const PriceSignal& other) const noexcept {
  if (values_.rows() != other.values_.rows() || values_.cols() != other.values_.cols()) return false;
  if (channels_ == other.channels_) return true;
  return channels() == other.channels();
}

}  // namespace uzawa
