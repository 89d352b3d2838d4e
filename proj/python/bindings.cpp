// Copyright 2026 The CSCA Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>
#include <string>
#include <vector>

#include "csca/analysis.hpp"
#include "csca/backbone.hpp"
#include "csca/dataset.hpp"
#include "csca/error.hpp"
#include "csca/evaluation.hpp"
#include "csca/imaging.hpp"
#include "csca/log.hpp"
#include "csca/model.hpp"
#include "csca/pipeline.hpp"
#include "csca/training.hpp"

namespace py = pybind11;

namespace csca {
namespace {

nlohmann::json to_json(const py::handle& obj) {
  const std::string text = py::module_::import("json").attr("dumps")(obj).cast<std::string>();
  return nlohmann::json::parse(text);
}

py::object from_json(const nlohmann::json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

// None -> defaults; a dict overrides only the fields it names.
RunConfig config_from(const py::object& obj) {
  RunConfig config;
  if (!obj.is_none()) config = RunConfig::merge_json(config, to_json(obj));
  config.validate();
  return config;
}

py::array_t<double> to_array(const ImageTensor& image) {
  py::array_t<double> out({3, image.height, image.width});
  std::copy(image.values.begin(), image.values.end(), out.mutable_data());
  return out;
}

ImageTensor from_array(const py::array_t<double, py::array::c_style | py::array::forcecast>& array) {
  if (array.ndim() != 3 || array.shape(0) != 3) throw DimensionError("image array must have shape (3, H, W)");
  ImageTensor image(static_cast<int>(array.shape(1)), static_cast<int>(array.shape(2)));
  std::copy(array.data(), array.data() + array.size(), image.values.begin());
  return image;
}

template <std::size_t N>
py::dict named(const std::array<double, N>& values, const auto& names) {
  py::dict d;
  for (std::size_t i = 0; i < N; ++i) d[py::str(std::string(names[i]))] = values[i];
  return d;
}

py::dict prediction_dict(const Prediction& p) {
  py::dict d;
  d["score"] = p.score;
  std::array<std::string_view, kNumContentLabels> labels;
  for (std::size_t i = 0; i < labels.size(); ++i) labels[i] = to_string(kAllContentLabels[i]);
  d["level_probs"] = named(p.level_probs, kLevelPhrases);
  d["content_probs"] = named(p.content_probs, labels);
  d["ink_intensity"] = p.ink_intensity;
  return d;
}

py::dict correlation_dict(const CorrelationRow& row) {
  py::dict d;
  d["category"] = row.category;
  d["n"] = row.n;
  d["srcc"] = row.srcc ? py::object(py::float_(*row.srcc)) : py::object(py::none());
  d["p_value"] = row.p_value ? py::object(py::float_(*row.p_value)) : py::object(py::none());
  return d;
}

// Python subclasses of EncoderBundle. Images cross the boundary as
// float64 arrays of shape (3, H, W).
class PyEncoderBundle : public EncoderBundle, public py::trampoline_self_life_support {
 public:
  std::string model_id() const override { PYBIND11_OVERRIDE_PURE(std::string, EncoderBundle, model_id); }
  int embed_dim() const override { PYBIND11_OVERRIDE_PURE(int, EncoderBundle, embed_dim); }
  int token_dim() const override { PYBIND11_OVERRIDE_PURE(int, EncoderBundle, token_dim); }

  Vector encode_image(const ImageTensor& image) const override {
    py::gil_scoped_acquire gil;
    py::function f = py::get_override(static_cast<const EncoderBundle*>(this), "encode_image");
    if (!f) throw ConfigError("EncoderBundle subclass does not implement encode_image");
    return f(to_array(image)).cast<Vector>();
  }

  std::vector<int> tokenize(std::string_view text) const override {
    PYBIND11_OVERRIDE_PURE(std::vector<int>, EncoderBundle, tokenize, std::string(text));
  }
  Matrix embed_tokens(const std::vector<int>& ids) const override {
    PYBIND11_OVERRIDE_PURE(Matrix, EncoderBundle, embed_tokens, ids);
  }
  Vector encode_text(const Matrix& tokens) const override {
    PYBIND11_OVERRIDE_PURE(Vector, EncoderBundle, encode_text, tokens);
  }
  Matrix encode_text_backward(const Matrix& tokens, const Vector& grad_output) const override {
    PYBIND11_OVERRIDE_PURE(Matrix, EncoderBundle, encode_text_backward, tokens, grad_output);
  }
  std::uint64_t parameter_checksum() const override {
    PYBIND11_OVERRIDE_PURE(std::uint64_t, EncoderBundle, parameter_checksum);
  }
};

std::shared_ptr<const EncoderBundle> bundle_or_default(const std::shared_ptr<EncoderBundle>& bundle,
                                                       const RunConfig& config) {
  if (bundle) return bundle;
  return make_bundle(config);
}

// A restored model together with the channel statistics it was trained with.
struct Predictor {
  Checkpoint checkpoint;
  std::shared_ptr<CscaModel> model;
};

Predictor make_predictor(const Checkpoint& checkpoint, const std::shared_ptr<EncoderBundle>& bundle,
                         const std::string& weights) {
  RunConfig config = checkpoint.config;
  if (!weights.empty()) config.weights_path = weights;
  return {checkpoint, std::make_shared<CscaModel>(restore_model(checkpoint, bundle_or_default(bundle, config)))};
}

std::vector<Subset> subsets_from(const std::optional<std::vector<std::string>>& names) {
  if (!names) return {Subset::kPrimaryTest, Subset::kRg1, Subset::kRg2, Subset::kFg};
  std::vector<Subset> out;
  for (const auto& n : *names) out.push_back(parse_subset(n));
  return out;
}

log::Level parse_level(const std::string& name) {
  if (name == "debug") return log::Level::kDebug;
  if (name == "info") return log::Level::kInfo;
  if (name == "warning") return log::Level::kWarning;
  if (name == "error") return log::Level::kError;
  throw ConfigError("unknown log level '" + name + "'");
}

}  // namespace

PYBIND11_MODULE(_csca, m) {
  m.doc() = "Creativity scoring of drawings with a frozen vision-language backbone";

  auto error = py::register_exception<Error>(m, "CscaError", PyExc_RuntimeError);
  py::register_exception<ParseError>(m, "ParseError", error);
  py::register_exception<ConfigError>(m, "ConfigError", error);
  py::register_exception<ImageError>(m, "ImageError", error);
  py::register_exception<DimensionError>(m, "DimensionError", error);
  py::register_exception<DegenerateInputError>(m, "DegenerateInputError", error);

  m.def("set_log_level", [](const std::string& level) { log::set_level(parse_level(level)); }, py::arg("level"));

  // Configuration ----------------------------------------------------------

  m.def("default_config", [] { return from_json(RunConfig{}.to_json()); });
  m.def("resolve_config", [](const py::object& overrides) { return from_json(config_from(overrides).to_json()); },
        py::arg("overrides") = py::none(), "Defaults with the given fields replaced, validated.");
  m.def("config_fingerprint", [](const py::object& config) { return config_from(config).fingerprint(); },
        py::arg("config") = py::none());
  m.def("ablation_config", [](int row, const py::object& base) {
        if (row < 1 || row > 5) throw ConfigError("ablation row must be in 1..5, got " + std::to_string(row));
        return from_json(ablation_configs(config_from(base))[row - 1].to_json());
      },
      py::arg("row"), py::arg("base") = py::none());

  // Records ----------------------------------------------------------------

  py::class_<DrawingRecord>(m, "DrawingRecord")
      .def(py::init<>())
      .def_readwrite("id", &DrawingRecord::id)
      .def_readwrite("image_path", &DrawingRecord::image_path)
      .def_readwrite("rating_raw", &DrawingRecord::rating_raw)
      .def_readwrite("rating_norm", &DrawingRecord::rating_norm)
      .def_readwrite("style_scalar", &DrawingRecord::style_scalar)
      .def_property(
          "split", [](const DrawingRecord& r) { return std::string(to_string(r.split)); },
          [](DrawingRecord& r, const std::string& s) { r.split = parse_split(s); })
      .def_property(
          "content_label",
          [](const DrawingRecord& r) -> std::optional<std::string> {
            if (!r.content_label) return std::nullopt;
            return std::string(to_string(*r.content_label));
          },
          [](DrawingRecord& r, const std::optional<std::string>& s) {
            r.content_label = s ? std::optional<ContentLabel>(parse_content_label(*s)) : std::nullopt;
          })
      .def("__eq__", [](const DrawingRecord& a, const DrawingRecord& b) { return a == b; })
      .def("__repr__", [](const DrawingRecord& r) {
        return "<DrawingRecord " + r.id + " split=" + std::string(to_string(r.split)) + ">";
      });

  m.def("ingest", [](const std::string& manifest, const std::string& annotations, const std::string& cache_dir) {
        return ingest(manifest, annotations, cache_dir).records;
      },
      py::arg("manifest"), py::arg("annotations") = "", py::arg("cache_dir") = "");
  m.def("assign_primary_splits", [](const std::vector<DrawingRecord>& records, std::uint64_t seed) {
        return normalize_ratings(assign_primary_splits(records, seed), Split::kTrain);
      },
      py::arg("records"), py::arg("seed") = 0);
  m.def("load_store", [](const std::string& path) { return load_store(path); }, py::arg("path"));
  m.def("save_store", [](const std::string& path, const std::vector<DrawingRecord>& records,
                         const std::string& fingerprint) { save_store(path, records, fingerprint); },
        py::arg("path"), py::arg("records"), py::arg("fingerprint") = "");
  m.def("make_synthetic", [](const std::string& directory, int n_train, int n_val, int n_test, int image_size,
                             std::uint64_t seed) {
        const SyntheticPaths paths = write_synthetic_dataset(directory, {n_train, n_val, n_test, image_size, seed});
        return py::make_tuple(paths.manifest, paths.annotations);
      },
      py::arg("directory"), py::arg("n_train") = 64, py::arg("n_val") = 16, py::arg("n_test") = 16,
      py::arg("image_size") = 64, py::arg("seed") = 1, "Returns (manifest, annotations) paths.");

  // Imaging ----------------------------------------------------------------

  py::class_<ChannelStats>(m, "ChannelStats")
      .def(py::init<>())
      .def_readwrite("mean", &ChannelStats::mean)
      .def_readwrite("std", &ChannelStats::std);

  m.def("load_inverted", [](const std::string& path) { return to_array(decode_and_invert(path)); },
        py::arg("path"), "Decoded image as inverted intensities, shape (3, H, W).");
  m.def("ink_intensity", [](const std::string& path) { return ink_intensity(decode_and_invert(path)); },
        py::arg("path"));
  m.def("preprocess", [](const py::array_t<double>& inverted, const ChannelStats& stats) {
        return to_array(preprocess(from_array(inverted), stats));
      },
      py::arg("inverted"), py::arg("stats"));

  // Encoders ---------------------------------------------------------------

  py::classh<EncoderBundle, PyEncoderBundle>(m, "EncoderBundle")
      .def(py::init<>())
      .def("model_id", &EncoderBundle::model_id)
      .def("embed_dim", &EncoderBundle::embed_dim)
      .def("token_dim", &EncoderBundle::token_dim)
      .def("encode_image", [](const EncoderBundle& b, const py::array_t<double>& image) {
        return b.encode_image(from_array(image));
      })
      .def("tokenize", [](const EncoderBundle& b, const std::string& text) { return b.tokenize(text); })
      .def("embed_tokens", &EncoderBundle::embed_tokens)
      .def("encode_text", &EncoderBundle::encode_text)
      .def("encode_text_backward", &EncoderBundle::encode_text_backward)
      .def("parameter_checksum", &EncoderBundle::parameter_checksum)
      .def("encode_prompt", [](const EncoderBundle& b, const std::string& text) { return b.encode_prompt(text); });

  m.def("toy_bundle", [](int embed_dim, std::uint64_t seed) -> std::shared_ptr<EncoderBundle> {
        return std::const_pointer_cast<PooledLinearBundle>(toy_bundle(embed_dim, seed));
      },
      py::arg("embed_dim") = 64, py::arg("seed") = 7);
  m.def("pretrained_bundle", [](const std::string& model_id, const std::string& path) -> std::shared_ptr<EncoderBundle> {
        return std::const_pointer_cast<PooledLinearBundle>(pretrained_bundle(model_id, path));
      },
      py::arg("model_id"), py::arg("weights_path"));

  // Training and evaluation ------------------------------------------------

  py::class_<Checkpoint>(m, "Checkpoint")
      .def_static("load", &load_checkpoint, py::arg("path"))
      .def("save", [](const Checkpoint& c, const std::string& path) { save_checkpoint(path, c); }, py::arg("path"))
      .def_property_readonly("config", [](const Checkpoint& c) { return from_json(c.config.to_json()); })
      .def_property_readonly("fingerprint", [](const Checkpoint& c) { return c.config.fingerprint(); })
      .def_property_readonly("stats", [](const Checkpoint& c) { return c.stats; })
      .def_readonly("backbone_id", &Checkpoint::backbone_id)
      .def_readonly("embed_dim", &Checkpoint::embed_dim)
      .def_readonly("best_epoch", &Checkpoint::best_epoch);

  py::class_<TrainedRun>(m, "TrainedRun")
      .def_readonly("checkpoint", &TrainedRun::checkpoint)
      .def_property_readonly("best_epoch", [](const TrainedRun& r) { return r.result.best_epoch; })
      .def_property_readonly("best_val_metric", [](const TrainedRun& r) { return r.result.best_val_metric; })
      .def_property_readonly("stopped_early", [](const TrainedRun& r) { return r.result.stopped_early; })
      .def_property_readonly("history", [](const TrainedRun& r) {
        py::list rows;
        for (const auto& e : r.result.history) {
          py::dict d;
          d["epoch"] = e.epoch;
          d["l_reg"] = e.l_reg;
          d["l_cls"] = e.l_cls;
          d["total"] = e.total;
          d["val_total"] = e.val_total;
          rows.append(d);
        }
        return rows;
      });

  m.def("train", [](const std::vector<DrawingRecord>& records, const py::object& config,
                    const std::shared_ptr<EncoderBundle>& bundle, const std::string& cache_dir) {
        const RunConfig resolved = config_from(config);
        const auto encoder = bundle_or_default(bundle, resolved);
        py::gil_scoped_release release;
        return train_on_records(records, resolved, encoder, cache_dir);
      },
      py::arg("records"), py::arg("config") = py::none(), py::arg("bundle") = nullptr, py::arg("cache_dir") = "");

  m.def("evaluate", [](const Checkpoint& checkpoint, const std::vector<DrawingRecord>& records,
                       const std::optional<std::vector<std::string>>& subsets,
                       const std::shared_ptr<EncoderBundle>& bundle, const std::string& weights,
                       const std::string& cache_dir) {
        RunConfig config = checkpoint.config;
        if (!weights.empty()) config.weights_path = weights;
        const auto encoder = bundle_or_default(bundle, config);
        const std::vector<Subset> selected = subsets_from(subsets);
        EvalReport report;
        {
          py::gil_scoped_release release;
          report = evaluate_subsets(checkpoint, records, encoder, selected, !subsets.has_value(), cache_dir);
        }
        return from_json(report.to_json());
      },
      py::arg("checkpoint"), py::arg("records"), py::arg("subsets") = py::none(), py::arg("bundle") = nullptr,
      py::arg("weights") = "", py::arg("cache_dir") = "");

  py::class_<Predictor>(m, "Predictor")
      .def(py::init(&make_predictor), py::arg("checkpoint"), py::arg("bundle") = nullptr, py::arg("weights") = "")
      .def("predict", [](const Predictor& p, const std::string& path) {
        return prediction_dict(predict(path, p.checkpoint.stats, *p.model));
      },
      py::arg("image_path"))
      .def("score_features", [](const Predictor& p, const Vector& features, double ink) {
        return prediction_dict(predict_encoded({features, ink}, *p.model));
      },
      py::arg("features"), py::arg("ink"))
      .def_property_readonly("graph", [](const Predictor& p) { return p.model->graph_description(); });

  // Metrics and analysis ---------------------------------------------------

  m.def("srcc", [](const std::vector<double>& x, const std::vector<double>& y) { return srcc(x, y); });
  m.def("plcc", [](const std::vector<double>& x, const std::vector<double>& y) { return plcc(x, y); });
  m.def("average_ranks", [](const std::vector<double>& x) { return average_ranks(x); });
  m.def("spearman_p_value", &spearman_p_value, py::arg("rho"), py::arg("n"));

  m.def("style_rating_correlation", [](const std::vector<DrawingRecord>& records) {
        const CorrelationTable table = style_rating_correlation(std::span<const DrawingRecord>(records));
        py::list rows;
        for (const auto& row : table.categories) rows.append(correlation_dict(row));
        rows.append(correlation_dict(table.combined));
        return rows;
      },
      py::arg("records"), "One row per content category followed by the combined row.");
  m.def("binned_rating_means", [](const std::vector<DrawingRecord>& records, int n_bins) {
        py::list rows;
        for (const auto& c : binned_rating_means(std::span<const DrawingRecord>(records), n_bins)) {
          py::dict d;
          d["bin"] = c.bin;
          d["lower"] = c.lower;
          d["upper"] = c.upper;
          d["category"] = std::string(to_string(c.category));
          d["n"] = c.n;
          d["mean_rating_norm"] = c.mean_rating_norm ? py::object(py::float_(*c.mean_rating_norm)) : py::none();
          d["mean_rating_raw"] = c.mean_rating_raw ? py::object(py::float_(*c.mean_rating_raw)) : py::none();
          rows.append(d);
        }
        return rows;
      },
      py::arg("records"), py::arg("n_bins") = 5);
}

}  // namespace csca
