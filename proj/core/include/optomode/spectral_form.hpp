#pragma once

// A quantity that is linear in the stationary input noises, stored as
// coefficients on the independent channels (a1_in, a2_in, thermal) at each
// absolute input frequency it draws from. Components at distinct frequencies
// are uncorrelated, so the PSD is a plain sum over terms once coefficients at
// the same frequency have been merged.

#include <array>
#include <vector>

#include <Eigen/Core>

#include "optomode/types.hpp"

namespace optomode {

inline constexpr int kNoiseChannels = 3;
enum class Channel : int { kAmplitudeIn = 0, kPhaseIn = 1, kThermal = 2 };

using ChannelRow = Eigen::Matrix<cplx, 1, kNoiseChannels>;
using ChannelPsd = std::array<double, kNoiseChannels>;

struct SpectralTerm {
  double frequency = 0.0;
  ChannelRow coeff = ChannelRow::Zero();
};

class SpectralForm {
 public:
  SpectralForm() = default;

  static SpectralForm single(double frequency, const ChannelRow& coeff) {
    SpectralForm f;
    f.add(frequency, coeff);
    return f;
  }
  static SpectralForm channel(double frequency, Channel ch, cplx scale = 1.0) {
    ChannelRow row = ChannelRow::Zero();
    row(static_cast<int>(ch)) = scale;
    return single(frequency, row);
  }

  void add(double frequency, const ChannelRow& coeff);

  SpectralForm& operator+=(const SpectralForm& other);
  SpectralForm& operator-=(const SpectralForm& other);
  SpectralForm& operator*=(cplx scale);

  friend SpectralForm operator+(SpectralForm a, const SpectralForm& b) { return a += b; }
  friend SpectralForm operator-(SpectralForm a, const SpectralForm& b) { return a -= b; }
  friend SpectralForm operator*(cplx s, SpectralForm a) { return a *= s; }
  friend SpectralForm operator*(SpectralForm a, cplx s) { return a *= s; }

  const std::vector<SpectralTerm>& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }

  /// sum over terms and channels of |c|^2 S_ch(frequency).
  template <class PsdFn>
  double psd(PsdFn&& channel_psd) const {
    double total = 0.0;
    for (const auto& t : terms_) {
      const ChannelPsd s = channel_psd(t.frequency);
      for (int c = 0; c < kNoiseChannels; ++c) {
        total += std::norm(t.coeff(c)) * s[static_cast<std::size_t>(c)];
      }
    }
    return total;
  }

 private:
  std::vector<SpectralTerm> terms_;
};

}  // namespace optomode
