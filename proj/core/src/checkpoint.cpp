#include "enero/checkpoint.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include "enero/error.hpp"

namespace enero {

namespace {
constexpr int kVersion = 1;

std::string hexfloat(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%a", v);
  return buf;
}

int hyper_int(const HyperBlock& hyper, const std::string& key) {
  for (const auto& [k, v] : hyper) {
    if (k == key) return std::stoi(v);
  }
  throw CheckpointError("checkpoint missing hyperparameter '" + key + "'");
}
}  // namespace

std::string checkpoint_to_text(const PolicyParams& params,
                               const HyperBlock& hyper) {
  std::ostringstream out;
  out << "ENERO-CKPT " << kVersion << "\n";
  out << "hyper gnn_hidden_state " << params.hidden_dim << "\n";
  out << "hyper message_passing_steps " << params.message_passing_steps << "\n";
  out << "hyper readout_units " << params.readout_units << "\n";
  out << "hyper activation selu\n";
  for (const auto& [k, v] : hyper) {
    if (k == "gnn_hidden_state" || k == "message_passing_steps" ||
        k == "readout_units" || k == "activation") {
      continue;
    }
    out << "hyper " << k << " " << v << "\n";
  }
  params.for_each_tensor([&out](const std::string& name, const Mat& m) {
    out << "tensor " << name << " " << m.rows() << " " << m.cols() << "\n";
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      for (Eigen::Index c = 0; c < m.cols(); ++c) {
        out << (c == 0 ? "" : " ") << hexfloat(m(r, c));
      }
      out << "\n";
    }
  });
  out << "end\n";
  return out.str();
}

PolicyParams checkpoint_from_text(const std::string& text, HyperBlock* hyper_out) {
  std::istringstream in(text);
  std::string magic;
  int version = 0;
  if (!(in >> magic >> version) || magic != "ENERO-CKPT") {
    throw CheckpointError("not an ENERO-CKPT file");
  }
  if (version != kVersion) {
    throw CheckpointError("unsupported checkpoint version " +
                          std::to_string(version));
  }

  HyperBlock hyper;
  std::map<std::string, Mat> tensors;
  std::string word;
  while (in >> word) {
    if (word == "hyper") {
      std::string key;
      in >> key;
      std::string value;
      std::getline(in, value);
      size_t start = value.find_first_not_of(" \t");
      if (start != std::string::npos) value = value.substr(start);
      hyper.emplace_back(key, value);
    } else if (word == "tensor") {
      std::string name;
      long rows = 0, cols = 0;
      if (!(in >> name >> rows >> cols) || rows < 0 || cols < 0) {
        throw CheckpointError("malformed tensor header");
      }
      Mat m(rows, cols);
      for (long r = 0; r < rows; ++r) {
        for (long c = 0; c < cols; ++c) {
          std::string tok;
          if (!(in >> tok)) throw CheckpointError("truncated tensor " + name);
          char* end = nullptr;
          m(r, c) = std::strtod(tok.c_str(), &end);
          if (end != tok.c_str() + tok.size()) {
            throw CheckpointError("bad value '" + tok + "' in tensor " + name);
          }
        }
      }
      tensors[name] = std::move(m);
    } else if (word == "end") {
      break;
    } else {
      throw CheckpointError("unexpected token '" + word + "' in checkpoint");
    }
  }

  PolicyParams params;
  params.hidden_dim = hyper_int(hyper, "gnn_hidden_state");
  params.message_passing_steps = hyper_int(hyper, "message_passing_steps");
  params.readout_units = hyper_int(hyper, "readout_units");

  params.for_each_tensor([&tensors](const std::string& name, Mat& m) {
    auto it = tensors.find(name);
    if (it == tensors.end()) {
      throw CheckpointError("checkpoint missing tensor " + name);
    }
    m = std::move(it->second);
    tensors.erase(it);
  });
  if (!tensors.empty()) {
    throw CheckpointError("checkpoint has unknown tensor " +
                          tensors.begin()->first);
  }

  // Shape sanity against the declared dimensions.
  const Eigen::Index H = params.hidden_dim;
  const Eigen::Index R = params.readout_units;
  auto check = [](const Mat& m, Eigen::Index rows, Eigen::Index cols,
                  const char* what) {
    if (m.rows() != rows || m.cols() != cols) {
      throw CheckpointError(std::string("tensor shape mismatch for ") + what);
    }
  };
  for (const GnnBranch* b : {&params.actor, &params.critic}) {
    check(b->message.weight, 2 * H, H, "message.weight");
    check(b->message.bias, 1, H, "message.bias");
    check(b->update.weight, 2 * H, H, "update.weight");
    check(b->update.bias, 1, H, "update.bias");
    check(b->readout_hidden.weight, H, R, "readout_hidden.weight");
    check(b->readout_hidden.bias, 1, R, "readout_hidden.bias");
    check(b->readout_out.weight, R, 1, "readout_out.weight");
    check(b->readout_out.bias, 1, 1, "readout_out.bias");
  }

  if (hyper_out != nullptr) *hyper_out = std::move(hyper);
  return params;
}

void save_checkpoint(const PolicyParams& params, const HyperBlock& hyper,
                     const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write checkpoint: " + path);
  out << checkpoint_to_text(params, hyper);
}

PolicyParams load_checkpoint(const std::string& path, HyperBlock* hyper_out) {
  std::ifstream in(path);
  if (!in) throw CheckpointError("cannot open checkpoint: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return checkpoint_from_text(ss.str(), hyper_out);
}

}  // namespace enero
