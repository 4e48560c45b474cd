#pragma once

#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "toxblend/chem/graph.hpp"
#include "toxblend/chem/rings.hpp"
#include "toxblend/common.hpp"

namespace toxblend::featurize {

/// Per-molecule quantities shared by several descriptors, computed once.
struct DescriptorContext {
  explicit DescriptorContext(const chem::MolecularGraph& graph);

  chem::MolecularGraph g;
  std::vector<std::vector<int>> distance;  // -1 when unreachable
  std::vector<chem::Ring> rings;
};

struct Descriptor {
  std::string name;
  std::function<double(const DescriptorContext&)> fn;
};

/// Ordered, versioned list of graph descriptors.
///
/// Text form: a "# toxblend descriptor registry <version>" header, then one
/// descriptor name per line. Names resolve against the built-in catalogue.
class DescriptorRegistry {
 public:
  DescriptorRegistry(std::string version, std::vector<Descriptor> descriptors);

  static const DescriptorRegistry& pld_v1();
  static DescriptorRegistry parse(std::string_view text);
  std::string serialize() const;

  const std::string& version() const { return version_; }
  std::size_t size() const { return descriptors_.size(); }
  std::vector<std::string> names() const;
  const std::vector<Descriptor>& descriptors() const { return descriptors_; }

 private:
  std::string version_;
  std::vector<Descriptor> descriptors_;
};

/// Names of every descriptor the catalogue knows.
std::vector<std::string> descriptor_catalogue();

/// Evaluates the registry on the largest fragment of g.
Vector compute_pld(const chem::MolecularGraph& g, const DescriptorRegistry& reg);

/// Topological polar surface area from N/O fragment contributions.
double topological_psa(const chem::MolecularGraph& g);

}  // namespace toxblend::featurize
