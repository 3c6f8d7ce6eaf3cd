#include "seizure/model_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "seizure/error.hpp"

namespace seizure {
namespace {

class Writer {
 public:
  void u8(std::uint8_t v) { bytes_.push_back(v); }
  void u16(std::uint16_t v) { put_le(v, 2); }
  void u64(std::uint64_t v) { put_le(v, 8); }
  void f64(double v) { put_le(std::bit_cast<std::uint64_t>(v), 8); }
  void str(const std::string& s) {
    u64(s.size());
    bytes_.insert(bytes_.end(), s.begin(), s.end());
  }
  void raw(const char* p, std::size_t n) { bytes_.insert(bytes_.end(), p, p + n); }
  void values(std::span<const double> v) {
    for (const double x : v) f64(x);
  }
  void matrix(const Eigen::MatrixXd& m) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      for (Eigen::Index c = 0; c < m.cols(); ++c) f64(m(r, c));
    }
  }
  std::vector<std::uint8_t> take() { return std::move(bytes_); }

 private:
  void put_le(std::uint64_t v, int n) {
    for (int i = 0; i < n; ++i) bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  std::vector<std::uint8_t> bytes_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::uint8_t u8() { return static_cast<std::uint8_t>(get_le(1)); }
  std::uint16_t u16() { return static_cast<std::uint16_t>(get_le(2)); }
  std::uint64_t u64() { return get_le(8); }
  double f64() { return std::bit_cast<double>(get_le(8)); }
  std::size_t count() {
    const auto n = u64();
    // Every counted element occupies at least one byte.
    if (n > bytes_.size() - pos_) throw ParseError("model file: implausible element count");
    return static_cast<std::size_t>(n);
  }
  std::string str() {
    const auto n = count();
    std::string s(reinterpret_cast<const char*>(bytes_.data() + pos_), n);
    pos_ += n;
    return s;
  }
  std::vector<double> values(std::size_t n) {
    need(8 * n);
    std::vector<double> v(n);
    for (auto& x : v) x = f64();
    return v;
  }
  Eigen::MatrixXd matrix(std::size_t rows, std::size_t cols) {
    need(8 * rows * cols);
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = f64();
    }
    return m;
  }
  Eigen::VectorXd vector(std::size_t n) {
    const auto v = values(n);
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(n));
  }
  void expect(const char* p, std::size_t n) {
    need(n);
    if (std::memcmp(bytes_.data() + pos_, p, n) != 0) throw ParseError("not an SZDT model file");
    pos_ += n;
  }
  bool done() const { return pos_ == bytes_.size(); }

 private:
  void need(std::size_t n) const {
    if (n > bytes_.size() - pos_) throw ParseError("model file is truncated");
  }
  std::uint64_t get_le(int n) {
    need(static_cast<std::size_t>(n));
    std::uint64_t v = 0;
    for (int i = 0; i < n; ++i) v |= static_cast<std::uint64_t>(bytes_[pos_++]) << (8 * i);
    return v;
  }
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

}  // namespace

ModelTag TrainedModel::tag() const {
  return std::visit(Overloaded{
                        [](const KnnModel& m) { return m.condensed ? ModelTag::kCnn : ModelTag::kKnn; },
                        [](const SvmModel&) { return ModelTag::kSvm; },
                        [](const LrModel&) { return ModelTag::kLr; },
                        [](const DbnModel&) { return ModelTag::kDbn; },
                    },
                    model);
}

std::size_t TrainedModel::input_dimension() const {
  return std::visit(Overloaded{
                        [](const KnnModel& m) { return m.store.dimension(); },
                        [](const SvmModel& m) { return m.dimension(); },
                        [](const LrModel& m) { return m.weights.size(); },
                        [](const DbnModel& m) { return m.input_dimension(); },
                    },
                    model);
}

int TrainedModel::predict_scaled(std::span<const double> x) const {
  return std::visit(Overloaded{
                        [&](const KnnModel& m) { return classify(m, x); },
                        [&](const SvmModel& m) { return svm_classify(m, x); },
                        [&](const LrModel& m) { return lr_classify(m, x).first; },
                        [&](const DbnModel& m) { return dbn_predict(m, x).label; },
                    },
                    model);
}

int TrainedModel::predict(std::span<const double> raw) const {
  if (scaler.empty()) return predict_scaled(raw);
  return predict_scaled(scaler.apply(raw));
}

std::vector<std::uint8_t> serialize(const TrainedModel& tm) {
  Writer w;
  w.raw(kModelMagic, 4);
  w.u16(kModelFormatVersion);
  w.u8(static_cast<std::uint8_t>(tm.tag()));
  const auto dim = tm.input_dimension();
  w.u64(dim);
  w.u64(tm.scaler.dimension());
  w.values(tm.scaler.mins());
  w.values(tm.scaler.maxs());
  w.str(tm.provenance.classifier);
  w.str(tm.provenance.protocol);
  w.str(tm.provenance.holdout);
  w.u64(tm.provenance.seed);

  std::visit(Overloaded{
                 [&](const KnnModel& m) {
                   w.u64(static_cast<std::uint64_t>(m.k));
                   w.u64(m.store.size());
                   for (std::size_t i = 0; i < m.store.size(); ++i) {
                     w.values(m.store.vectors[i]);
                     w.u8(static_cast<std::uint8_t>(m.store.labels[i]));
                   }
                 },
                 [&](const SvmModel& m) {
                   w.u8(static_cast<std::uint8_t>(m.kernel.kind));
                   w.f64(m.kernel.gamma);
                   w.u64(static_cast<std::uint64_t>(m.kernel.degree));
                   w.f64(m.kernel.coef0);
                   w.f64(m.c_reg);
                   w.f64(m.bias);
                   w.u64(m.support_vectors.size());
                   for (std::size_t i = 0; i < m.support_vectors.size(); ++i) {
                     w.f64(m.coefficients[i]);
                     w.values(m.support_vectors[i]);
                   }
                 },
                 [&](const LrModel& m) {
                   w.values(m.weights);
                   w.f64(m.bias);
                   w.f64(m.rate);
                   w.u64(m.iterations);
                 },
                 [&](const DbnModel& m) {
                   w.u64(m.layers.size());
                   w.u64(m.layers.front().n_visible());
                   for (const auto& rbm : m.layers) w.u64(rbm.n_hidden());
                   for (const auto& rbm : m.layers) {
                     w.matrix(rbm.weights);
                     w.values(std::span(rbm.hidden_bias.data(), rbm.n_hidden()));
                     w.values(std::span(rbm.visible_bias.data(), rbm.n_visible()));
                   }
                   w.matrix(m.output_weights);
                   w.values(std::span(m.output_bias.data(), 2));
                   const auto& p = m.params;
                   w.u64(p.pretrain_epochs);
                   w.f64(p.pretrain_rate);
                   w.u64(p.finetune_iterations);
                   w.f64(p.finetune_rate);
                   w.u64(p.batch_size);
                   w.u8(static_cast<std::uint8_t>(p.mode));
                   w.u64(p.seed);
                 },
             },
             tm.model);
  return w.take();
}

TrainedModel deserialize(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  r.expect(kModelMagic, 4);
  const auto version = r.u16();
  if (version != kModelFormatVersion) {
    throw ParseError("unsupported model format version " + std::to_string(version));
  }
  const auto tag = r.u8();
  const auto dim = static_cast<std::size_t>(r.u64());
  TrainedModel tm;
  const auto scaler_dim = r.count();
  if (scaler_dim > 0) {
    auto mins = r.values(scaler_dim);
    auto maxs = r.values(scaler_dim);
    tm.scaler = MinMaxScaler(std::move(mins), std::move(maxs));
  }
  tm.provenance.classifier = r.str();
  tm.provenance.protocol = r.str();
  tm.provenance.holdout = r.str();
  tm.provenance.seed = r.u64();

  switch (static_cast<ModelTag>(tag)) {
    case ModelTag::kKnn:
    case ModelTag::kCnn: {
      KnnModel m;
      m.condensed = static_cast<ModelTag>(tag) == ModelTag::kCnn;
      m.k = static_cast<int>(r.u64());
      const auto n = r.count();
      for (std::size_t i = 0; i < n; ++i) {
        m.store.vectors.push_back(r.values(dim));
        m.store.labels.push_back(r.u8());
      }
      tm.model = std::move(m);
      break;
    }
    case ModelTag::kSvm: {
      SvmModel m;
      m.kernel.kind = static_cast<KernelKind>(r.u8());
      m.kernel.gamma = r.f64();
      m.kernel.degree = static_cast<int>(r.u64());
      m.kernel.coef0 = r.f64();
      m.c_reg = r.f64();
      m.bias = r.f64();
      const auto n = r.count();
      for (std::size_t i = 0; i < n; ++i) {
        m.coefficients.push_back(r.f64());
        m.support_vectors.push_back(r.values(dim));
      }
      tm.model = std::move(m);
      break;
    }
    case ModelTag::kLr: {
      LrModel m;
      m.weights = r.values(dim);
      m.bias = r.f64();
      m.rate = r.f64();
      m.iterations = static_cast<std::size_t>(r.u64());
      tm.model = std::move(m);
      break;
    }
    case ModelTag::kDbn: {
      DbnModel m;
      const auto layers = r.count();
      std::vector<std::size_t> sizes{static_cast<std::size_t>(r.u64())};
      for (std::size_t l = 0; l < layers; ++l) sizes.push_back(static_cast<std::size_t>(r.u64()));
      if (sizes.front() != dim) throw ParseError("model file: DBN input size disagrees with header");
      for (std::size_t l = 0; l < layers; ++l) {
        Rbm rbm;
        rbm.weights = r.matrix(sizes[l], sizes[l + 1]);
        rbm.hidden_bias = r.vector(sizes[l + 1]);
        rbm.visible_bias = r.vector(sizes[l]);
        m.layers.push_back(std::move(rbm));
      }
      m.output_weights = r.matrix(sizes.back(), 2);
      m.output_bias = r.vector(2);
      m.params.layer_sizes = sizes;
      m.params.pretrain_epochs = static_cast<std::size_t>(r.u64());
      m.params.pretrain_rate = r.f64();
      m.params.finetune_iterations = static_cast<std::size_t>(r.u64());
      m.params.finetune_rate = r.f64();
      m.params.batch_size = static_cast<std::size_t>(r.u64());
      m.params.mode = static_cast<FinetuneMode>(r.u8());
      m.params.seed = r.u64();
      m.validate();
      tm.model = std::move(m);
      break;
    }
    default:
      throw ParseError("model file: unknown classifier tag " + std::to_string(tag));
  }
  if (!r.done()) throw ParseError("model file has trailing bytes");
  if (!tm.scaler.empty() && tm.scaler.dimension() != dim) {
    throw ParseError("model file: scaler dimension disagrees with header");
  }
  return tm;
}

void save_model(const TrainedModel& model, const std::filesystem::path& path) {
  const auto bytes = serialize(model);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("write failed for " + path.string());
}

TrainedModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                        std::istreambuf_iterator<char>());
  return deserialize(bytes);
}

}  // namespace seizure
