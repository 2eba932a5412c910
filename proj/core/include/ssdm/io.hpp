#pragma once

// Versioned JSON for instances and decisions, CSV writers for logs.
// Every document carries "format_version" and "kind".

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "ssdm/bisection.hpp"
#include "ssdm/engines.hpp"
#include "ssdm/geometry.hpp"
#include "ssdm/inventory.hpp"
#include "ssdm/model.hpp"

namespace ssdm {

inline constexpr int kFormatVersion = 1;

/// Stage whose right-hand side moves with its data:
/// A y + B x + C w <= d + shift * xi, xi uniform on [xi_lo, xi_hi].
struct PolyhedralStage {
  StagePolyhedron base;
  Mat rhs_shift;  // rows x |xi|; may have zero columns
  Vec xi_lo, xi_hi;
};

/// A generic model spelled out as matrices.
struct PolyhedralInstance {
  std::size_t dim = 0;
  PolyhedralRep Y;
  Vec box_lo, box_hi;
  std::vector<PolyhedralStage> stages;

  /// Throws BadInstance or DimensionMismatch.
  void validate() const;
};

SemiStochasticModel build_model(const PolyhedralInstance& inst);

struct Instance {
  std::variant<InventoryInstance, PolyhedralInstance> data;
  std::optional<Vec> objective;  // for minimize; inventory defaults to the total budget

  bool is_inventory() const noexcept { return std::holds_alternative<InventoryInstance>(data); }
};

/// Throws SchemaError; parse errors name the line and column.
Instance parse_instance(std::string_view text, std::string_view source = "<string>");
std::string dump_instance(const Instance& inst);
Instance load_instance(const std::filesystem::path& path);
void save_instance(const std::filesystem::path& path, const Instance& inst);

/// A decision, or rule coefficients when rules != "constant".
struct Decision {
  Vec y;
  std::string rules = "constant";
  std::optional<double> bound;  // smallest productive target when produced by minimize
};

Decision parse_decision(std::string_view text, std::string_view source = "<string>");
std::string dump_decision(const Decision& d);
Decision load_decision(const std::filesystem::path& path);
void save_decision(const std::filesystem::path& path, const Decision& d);

/// Shortest text that reads back to the same double; "nan", "inf", "-inf".
std::string format_double(double v);

/// s,delta,samples,outcome (one line per oracle call).
void write_iterations_csv(std::ostream& out, const std::vector<IterationRecord>& log);
/// k,s,delta,samples,outcome across all bisection steps.
void write_step_iterations_csv(std::ostream& out, const std::vector<BisectionStep>& steps);
/// k,target,outcome,lo,hi,calls
void write_bisection_csv(std::ostream& out, const std::vector<BisectionStep>& steps);
/// t,product,component,value for the nominal data.
void write_nominals_csv(std::ostream& out, const InventoryInstance& inst);
/// t,product,lower,upper,budget for an inventory decision.
void write_bands_csv(std::ostream& out, const InventoryInstance& inst, std::span<const double> y);

/// Writes text to path, creating parent directories. Throws std::runtime_error.
void write_file(const std::filesystem::path& path, std::string_view text);
std::string read_file(const std::filesystem::path& path);

}  // namespace ssdm
