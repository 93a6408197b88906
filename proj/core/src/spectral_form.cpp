#include "optomode/spectral_form.hpp"

#include <algorithm>
#include <cmath>

namespace optomode {

namespace {

bool same_frequency(double a, double b) {
  return std::abs(a - b) <= 1e-12 * std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace

void SpectralForm::add(double frequency, const ChannelRow& coeff) {
  for (auto& t : terms_) {
    if (same_frequency(t.frequency, frequency)) {
      t.coeff += coeff;
      return;
    }
  }
  terms_.push_back({frequency, coeff});
}

SpectralForm& SpectralForm::operator+=(const SpectralForm& other) {
  for (const auto& t : other.terms_) add(t.frequency, t.coeff);
  return *this;
}

SpectralForm& SpectralForm::operator-=(const SpectralForm& other) {
  for (const auto& t : other.terms_) add(t.frequency, -t.coeff);
  return *this;
}

SpectralForm& SpectralForm::operator*=(cplx scale) {
  for (auto& t : terms_) t.coeff *= scale;
  return *this;
}

}  // namespace optomode
