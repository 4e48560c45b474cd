#include "toxblend/dataset/assay_table.hpp"

#include <array>
#include <cstring>
#include <fstream>

#include "toxblend/chem/smiles.hpp"
#include "toxblend/dataset/csv.hpp"
#include "toxblend/log.hpp"

namespace toxblend::dataset {

AssayTable::AssayTable(std::vector<Molecule> molecules, std::vector<chem::MolecularGraph> graphs,
                       std::vector<Target> targets, LabelMatrix labels)
    : molecules_(std::move(molecules)),
      graphs_(std::move(graphs)),
      targets_(std::move(targets)),
      labels_(std::move(labels)) {
  if (graphs_.size() != molecules_.size()) throw DataError("graph count differs from molecule count");
  if (labels_.rows() != molecule_count() || labels_.cols() != target_count()) {
    throw DataError("label matrix shape differs from molecules x targets");
  }
}

std::vector<std::string> AssayTable::smiles() const {
  std::vector<std::string> out;
  out.reserve(molecules_.size());
  for (const auto& m : molecules_) out.push_back(m.smiles);
  return out;
}

AssayTable AssayTable::subset(std::span<const int> rows) const {
  std::vector<Molecule> mols;
  std::vector<chem::MolecularGraph> graphs;
  LabelMatrix labels(static_cast<Eigen::Index>(rows.size()), target_count());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    mols.push_back(molecules_.at(static_cast<std::size_t>(rows[i])));
    graphs.push_back(graphs_[static_cast<std::size_t>(rows[i])]);
    labels.row(static_cast<Eigen::Index>(i)) = labels_.row(rows[i]);
  }
  return AssayTable(std::move(mols), std::move(graphs), targets_, std::move(labels));
}

std::string default_family(const std::string& target) {
  if (target.starts_with("NR-")) return "Nuclear Receptor";
  if (target.starts_with("SR-")) return "Stress Response";
  return "";
}

namespace {

Label parse_label(const std::string& cell, std::size_t row, const std::string& column) {
  if (cell.empty()) return Label::Missing;
  if (cell == "1" || cell == "1.0") return Label::Active;
  if (cell == "0" || cell == "0.0") return Label::Inactive;
  throw DataError("invalid label '" + cell + "' at row " + std::to_string(row) + ", column " + column);
}

}  // namespace

AssayTable load_csv(const std::string& path, const CsvLayout& layout) {
  const CsvTable csv = read_csv_file(path);
  const std::size_t smiles_col = csv.column(layout.smiles_column);
  const std::ptrdiff_t id_col =
      layout.id_column.empty() ? -1 : static_cast<std::ptrdiff_t>(csv.column(layout.id_column));
  std::vector<std::size_t> target_cols;
  std::vector<Target> targets;
  if (layout.target_columns.empty()) {
    for (std::size_t c = 0; c < csv.header.size(); ++c) {
      if (c == smiles_col || static_cast<std::ptrdiff_t>(c) == id_col) continue;
      target_cols.push_back(c);
    }
  } else {
    for (const auto& name : layout.target_columns) target_cols.push_back(csv.column(name));
  }
  for (auto c : target_cols) targets.push_back({csv.header[c], default_family(csv.header[c])});

  std::vector<Molecule> mols;
  std::vector<chem::MolecularGraph> graphs;
  std::vector<std::vector<Label>> rows;
  for (std::size_t r = 0; r < csv.rows.size(); ++r) {
    const auto& row = csv.rows[r];
    std::vector<Label> labels;
    for (auto c : target_cols) labels.push_back(parse_label(row[c], r + 1, csv.header[c]));
    const std::string id = id_col >= 0 ? row[static_cast<std::size_t>(id_col)] : "row-" + std::to_string(r + 1);
    try {
      graphs.push_back(chem::parse_molecule(row[smiles_col]));
    } catch (const chem::ParseError& e) {
      log::warn("dropping row " + std::to_string(r + 1) + " (" + id + "): " + e.what());
      continue;
    }
    mols.push_back({id, row[smiles_col]});
    rows.push_back(std::move(labels));
  }
  LabelMatrix labels(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(targets.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t t = 0; t < targets.size(); ++t) {
      labels(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(t)) = rows[i][t];
    }
  }
  return AssayTable(std::move(mols), std::move(graphs), std::move(targets), std::move(labels));
}

namespace {

constexpr std::array<char, 4> kMagic = {'T', 'X', 'B', 'T'};
constexpr std::uint32_t kVersion = 1;

void put_u32(std::ostream& out, std::uint32_t v) {
  const char bytes[4] = {static_cast<char>(v & 0xFF), static_cast<char>((v >> 8) & 0xFF),
                         static_cast<char>((v >> 16) & 0xFF), static_cast<char>((v >> 24) & 0xFF)};
  out.write(bytes, 4);
}

void put_str(std::ostream& out, const std::string& s) {
  put_u32(out, static_cast<std::uint32_t>(s.size()));
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::uint32_t get_u32(std::istream& in) {
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char*>(b), 4)) throw DataError("table file truncated");
  return static_cast<std::uint32_t>(b[0]) | static_cast<std::uint32_t>(b[1]) << 8 |
         static_cast<std::uint32_t>(b[2]) << 16 | static_cast<std::uint32_t>(b[3]) << 24;
}

std::string get_str(std::istream& in) {
  const auto n = get_u32(in);
  if (n > (1U << 24)) throw DataError("table file string too long");
  std::string s(n, '\0');
  if (!in.read(s.data(), n)) throw DataError("table file truncated");
  return s;
}

}  // namespace

void save_table(const AssayTable& t, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path);
  out.write(kMagic.data(), kMagic.size());
  put_u32(out, kVersion);
  put_u32(out, static_cast<std::uint32_t>(t.molecule_count()));
  put_u32(out, static_cast<std::uint32_t>(t.target_count()));
  for (const auto& target : t.targets()) {
    put_str(out, target.name);
    put_str(out, target.family);
  }
  for (const auto& m : t.molecules()) {
    put_str(out, m.id);
    put_str(out, m.smiles);
  }
  for (int i = 0; i < t.molecule_count(); ++i) {
    for (int j = 0; j < t.target_count(); ++j) out.put(static_cast<char>(static_cast<std::int8_t>(t.label(i, j))));
  }
  if (!out) throw DataError("failed writing " + path);
}

AssayTable load_table(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  std::array<char, 4> magic{};
  if (!in.read(magic.data(), 4) || magic != kMagic) throw DataError(path + " is not a toxblend table");
  if (const auto v = get_u32(in); v != kVersion) throw DataError("unsupported table version " + std::to_string(v));
  const auto n = get_u32(in), t = get_u32(in);
  std::vector<Target> targets(t);
  for (auto& target : targets) {
    target.name = get_str(in);
    target.family = get_str(in);
  }
  std::vector<Molecule> mols(n);
  std::vector<chem::MolecularGraph> graphs;
  graphs.reserve(n);
  for (auto& m : mols) {
    m.id = get_str(in);
    m.smiles = get_str(in);
    graphs.push_back(chem::parse_molecule(m.smiles));
  }
  LabelMatrix labels(n, t);
  for (std::uint32_t i = 0; i < n; ++i) {
    for (std::uint32_t j = 0; j < t; ++j) {
      char c;
      if (!in.get(c)) throw DataError("table file truncated");
      const auto v = static_cast<std::int8_t>(c);
      if (v < -1 || v > 1) throw DataError("invalid label byte in table file");
      labels(i, j) = static_cast<Label>(v);
    }
  }
  return AssayTable(std::move(mols), std::move(graphs), std::move(targets), std::move(labels));
}

std::vector<int> positives_per_target(const AssayTable& t) {
  std::vector<int> out(static_cast<std::size_t>(t.target_count()), 0);
  for (int i = 0; i < t.molecule_count(); ++i) {
    for (int j = 0; j < t.target_count(); ++j) out[static_cast<std::size_t>(j)] += t.label(i, j) == Label::Active;
  }
  return out;
}

}  // namespace toxblend::dataset
