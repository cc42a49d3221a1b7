#include "fss/sampler.hpp"

#include <utility>

#include "fss/errors.hpp"
#include "fss/output.hpp"

namespace fss {

namespace {

// Leaves thinner than this fraction of the domain side on any axis stop
// splitting; they keep counting draws and updating mass.
constexpr double kMinSideFraction = 1e-12;

}  // namespace

std::size_t Node::depth() const noexcept {
  std::size_t d = 1;
  for (const Node* p = parent; p; p = p->parent) ++d;
  return d;
}

double free_ratio(double weighted_free, double weighted_samples) {
  return weighted_samples > 0.0 ? weighted_free / weighted_samples : 1.0;
}

double total_leaf_mass(const Node& root) {
  if (root.leaf()) return root.free_mass;
  return total_leaf_mass(*root.child[0]) + total_leaf_mass(*root.child[1]);
}

double descend_probability(const Node& root, const Node& v) {
  const double total = total_leaf_mass(root);
  if (total <= 0.0) throw ZeroTotalMass("total leaf mass is zero");
  return v.free_mass / total;
}

const Node& descend(const Node& root, RandomStream& rng) {
  if (root.free_mass <= 0.0) throw ZeroTotalMass("total leaf mass is zero");
  const Node* v = &root;
  while (!v->leaf()) {
    const double u = rng.uniform(0.0, v->free_mass);
    v = u <= v->child[0]->free_mass ? v->child[0].get() : v->child[1].get();
  }
  return *v;
}

void collect_leaves(const Node& root, std::vector<const Node*>& out) {
  if (root.leaf()) {
    out.push_back(&root);
    return;
  }
  collect_leaves(*root.child[0], out);
  collect_leaves(*root.child[1], out);
}

SamplerTree::SamplerTree(Environment env, std::uint64_t seed)
    : env_(std::move(env)), rng_(seed) {
  root_ = std::make_unique<Node>(env_.domain(), 0);
  root_->free_mass = env_.domain().measure();
}

bool SamplerTree::splittable(const HyperRect& r) const {
  for (std::size_t i = 0; i < r.dim(); ++i) {
    if (r.side(i) < kMinSideFraction * env_.domain().side(i)) return false;
  }
  return true;
}

SampleRecord SamplerTree::generate() {
  if (!root_->leaf() && root_->free_mass <= 0.0) {
    throw InvariantViolation("dead tree: internal root carries no mass");
  }

  // Descent, biased by the children's estimated free mass.
  Node* v = root_.get();
  std::size_t depth = 1;
  while (!v->leaf()) {
    const double u = rng_.uniform(0.0, v->free_mass);
    v = u <= v->child[0]->free_mass ? v->child[0].get() : v->child[1].get();
    ++depth;
  }

  Point x = sample_uniform(v->rect, rng_);
  v->weighted_samples += 1.0;
  const bool free = env_.collision_free(x);
  if (free) {
    v->weighted_free += 1.0;
    if (splittable(v->rect)) {
      // Split at the free point; each child inherits the counts scaled by
      // its share of the volume, so its ratio starts equal to the parent's.
      v->split_point = x;
      auto halves = v->rect.split(x, v->split_axis);
      const double parent_measure = v->rect.measure();
      const std::size_t child_axis = (v->split_axis + 1) % dimension();
      std::array<HyperRect, 2> rects{std::move(halves.first),
                                     std::move(halves.second)};
      for (std::size_t i = 0; i < 2; ++i) {
        auto c = std::make_unique<Node>(std::move(rects[i]), child_axis);
        c->parent = v;
        const double m = c->rect.measure();
        const double w = parent_measure > 0.0 ? m / parent_measure : 0.0;
        c->weighted_samples = w * v->weighted_samples;
        c->weighted_free = w * v->weighted_free;
        c->free_mass = free_ratio(c->weighted_free, c->weighted_samples) * m;
        v->child[i] = std::move(c);
      }
    }
  }

  // Refresh mass on the whole touched path, leaf first.
  v->free_mass =
      v->leaf()
          ? free_ratio(v->weighted_free, v->weighted_samples) * v->rect.measure()
          : v->child[0]->free_mass + v->child[1]->free_mass;
  for (Node* p = v->parent; p; p = p->parent) {
    p->free_mass = p->child[0]->free_mass + p->child[1]->free_mass;
  }

  SampleRecord rec{std::move(x), free, depth, draws_, v};
  ++draws_;
  return rec;
}

double SamplerTree::descend_probability(const Node& v) const {
  return fss::descend_probability(*root_, v);
}

const Node& SamplerTree::descend_only(RandomStream& rng) const {
  return descend(*root_, rng);
}

std::vector<const Node*> SamplerTree::leaves() const {
  std::vector<const Node*> out;
  collect_leaves(*root_, out);
  return out;
}

namespace {

void accumulate_stats(const Node& v, std::size_t depth, TreeStats& s) {
  ++s.node_count;
  if (s.nodes_per_depth.size() <= depth) s.nodes_per_depth.resize(depth + 1, 0);
  ++s.nodes_per_depth[depth];
  if (v.leaf()) {
    ++s.leaf_count;
    s.total_leaf_mass += v.free_mass;
    return;
  }
  accumulate_stats(*v.child[0], depth + 1, s);
  accumulate_stats(*v.child[1], depth + 1, s);
}

void dump_node(const Node& v, std::size_t depth, std::string& out) {
  out += std::to_string(depth);
  for (double c : v.rect.lo()) {
    out += ' ';
    out += format_double(c);
  }
  for (double c : v.rect.hi()) {
    out += ' ';
    out += format_double(c);
  }
  out += ' ';
  out += std::to_string(v.split_axis);
  out += ' ';
  out += format_double(v.weighted_samples);
  out += ' ';
  out += format_double(v.weighted_free);
  out += ' ';
  out += format_double(v.free_mass);
  out += v.leaf() ? " 1\n" : " 0\n";
  if (!v.leaf()) {
    dump_node(*v.child[0], depth + 1, out);
    dump_node(*v.child[1], depth + 1, out);
  }
}

}  // namespace

TreeStats SamplerTree::stats() const {
  TreeStats s;
  accumulate_stats(*root_, 1, s);
  return s;
}

std::string SamplerTree::snapshot() const {
  std::string out;
  dump_node(*root_, 1, out);
  return out;
}

}  // namespace fss
