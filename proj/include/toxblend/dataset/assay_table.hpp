#pragma once

#include <span>
#include <string>
#include <vector>

#include "toxblend/chem/graph.hpp"
#include "toxblend/common.hpp"

namespace toxblend::dataset {

struct Target {
  std::string name;
  std::string family;  // empty when unknown
};

struct Molecule {
  std::string id;
  std::string smiles;
};

/// Molecules x targets with three-valued labels. Every stored SMILES parsed.
class AssayTable {
 public:
  AssayTable() = default;
  AssayTable(std::vector<Molecule> molecules, std::vector<chem::MolecularGraph> graphs,
             std::vector<Target> targets, LabelMatrix labels);

  int molecule_count() const { return static_cast<int>(molecules_.size()); }
  int target_count() const { return static_cast<int>(targets_.size()); }
  const std::vector<Molecule>& molecules() const { return molecules_; }
  const std::vector<chem::MolecularGraph>& graphs() const { return graphs_; }
  const std::vector<Target>& targets() const { return targets_; }
  const LabelMatrix& labels() const { return labels_; }
  Label label(int molecule, int target) const { return labels_(molecule, target); }

  std::vector<std::string> smiles() const;
  AssayTable subset(std::span<const int> rows) const;

 private:
  std::vector<Molecule> molecules_;
  std::vector<chem::MolecularGraph> graphs_;
  std::vector<Target> targets_;
  LabelMatrix labels_;
};

struct CsvLayout {
  std::string smiles_column = "smiles";
  /// Empty: every column other than the SMILES and id columns.
  std::vector<std::string> target_columns;
  /// Empty: ids are "row-<n>" by 1-based data row.
  std::string id_column;
};

/// "1"/"1.0" active, "0"/"0.0" inactive, empty missing. Rows whose SMILES do
/// not parse are dropped with a warning; row order is preserved.
AssayTable load_csv(const std::string& path, const CsvLayout& layout);

/// Family of a target name by its prefix ("NR-" nuclear receptor, "SR-"
/// stress response); empty otherwise.
std::string default_family(const std::string& target);

/// Native binary persistence. Layout (little-endian):
///   "TXBT" magic, u32 version = 1,
///   u32 molecules, u32 targets,
///   targets: str name, str family; molecules: str id, str smiles
///   (str = u32 byte length + bytes),
///   molecules*targets int8 labels row-major (-1 missing, 0, 1).
void save_table(const AssayTable& t, const std::string& path);
AssayTable load_table(const std::string& path);

/// Active-label count per target.
std::vector<int> positives_per_target(const AssayTable& t);

}  // namespace toxblend::dataset
