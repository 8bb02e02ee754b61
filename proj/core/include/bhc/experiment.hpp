// experiment.hpp — named experiment presets, flat key=value configuration, and
// deterministic file output (CSV tables plus a JSON summary per run).
//
// Preset defaults encode the reference parameter sets of the study
// (L = 6, J = 1, g = 4 for the closed-lattice diagnostics; L = 20, gamma = 0.1,
// 1000 zone-edge trajectories for the depletion runs). Every run writes a
// manifest that reproduces it bit-identically when fed back via --config.

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace bhc {

enum class ParamType { integer, real, text };

struct ParamDef {
    std::string key;
    ParamType type = ParamType::real;
    std::string default_value;
    bool has_min = false, has_max = false;
    double min = 0.0, max = 0.0;
    std::vector<std::string> choices;  // for text params; empty = free-form
};

struct ExperimentSpec {
    std::string preset;
    std::map<std::string, std::string> params;  // resolved, canonical form
    std::string output_dir;

    long get_int(const std::string& key) const;
    double get_real(const std::string& key) const;
    const std::string& get_text(const std::string& key) const;
    std::uint64_t seed() const { return static_cast<std::uint64_t>(get_int("seed")); }
    int workers() const;                // resolves 0 to hardware concurrency
    long scaled(const std::string& key) const;  // round(value * traj_scale), >= 1
};

struct ValidationOutcome {
    std::optional<ExperimentSpec> spec;
    std::vector<std::string> errors;
    bool ok() const { return errors.empty() && spec.has_value(); }
};

const std::vector<std::string>& preset_names();
std::vector<ParamDef> preset_schema(const std::string& preset);

// Resolves defaults <- overrides, reporting every violation at once.
ValidationOutcome make_spec(const std::string& preset,
                            const std::map<std::string, std::string>& overrides,
                            const std::string& output_dir = "");

// Parses flat "key = value" text (comments with '#'), including emitted
// manifests, and validates it.
ValidationOutcome validate_config(const std::string& config_text,
                                  const std::string& output_dir = "");

// Executes the preset and writes manifest.txt, result tables, and
// summary.json into spec.output_dir. Returns 0 on success.
int run(const ExperimentSpec& spec);

}  // namespace bhc
