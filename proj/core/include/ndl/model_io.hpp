#pragma once

#include <stdexcept>
#include <string>

#include "ndl/model.hpp"
#include "ndl/tsp.hpp"

namespace ndl {

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

/// Line-oriented model format, three sections:
///   vars
///     next index 1..6 domain 1..6
///     order index 1..6 domain 1..6 derived circuit_order(next)
///   constraints
///     all_diff_next neq_values all_pairs(next)
///   constants
///     weights 1 2 3
/// `#` starts a comment; blank lines are ignored; `constants` is optional.
Model parse_model_text(const std::string& text);
Model load_model(const std::string& path);
std::string render_model(const Model& m);

/// Instance format: first line the city count, then one tour per line as
/// space-separated successor values.  Tours are propagated and must form a
/// single cycle.
TspInstance parse_instance_text(const std::string& text, const Model& m);
TspInstance load_instance(const std::string& path, const Model& m);
std::string render_instance(const TspInstance& inst, const Model& m);

} // namespace ndl
