#ifndef ENTKIT_STATE_IO_HPP
#define ENTKIT_STATE_IO_HPP

#include <string>
#include <vector>

#include <json.hpp>

#include "entkit/distill.hpp"
#include "entkit/fock.hpp"
#include "entkit/gaussian.hpp"

namespace entkit::io {

using nlohmann::json;

/// Reject keys outside the allowed set (strict config parsing).
void require_keys(const json& obj, const std::vector<std::string>& allowed, const std::string& context);

/// Fock matrix dump: {n_modes, cutoff, entries: [[a,b,c,d,re,im], ...]},
/// listing entries with |value| > 1e-14 (one-mode states use [a,c,re,im]).
json fock_to_json(const fock::FockDensityMatrix& state);
fock::FockDensityMatrix fock_from_json(const json& j);

json gaussian_to_json(const gauss::GaussianState& state);
gauss::GaussianState gaussian_from_json(const json& j);

/// Input-state specification:
///   {kind:"schmidt", alphas:[...]}            amplitudes of sum alpha_n |n,n>
///   {kind:"elements", cutoff, entries:[...]}  explicit matrix elements
///   {kind:"procrustean", r, T, tau}           mixed Procrustean family
///   {kind:"gaussian", gamma:[...16], d:[...4]} centered Gaussian (d must be 0)
/// Amplitudes are real numbers or [re, im] pairs.
fock::FockDensityMatrix state_from_spec(const json& spec, int cutoff);

/// Parse a channel block {kind:"none"|"absorb"|"dephase"|"phase_diffuse",
/// parameter, both?}.
distill::ChannelSpec channel_from_json(const json& j, bool* on_both = nullptr);

json load_json_file(const std::string& path);
void save_json_file(const std::string& path, const json& j);

}  // namespace entkit::io

#endif
