// Stand-in external predictor for protocol tests.
//
//   mock_predictor --input IN --output OUT --seed S [--mode MODE] [--spec SPEC]
//                  [--lock-dir DIR]
//
// Modes: labels (default; builtin SPEC), probabilities, fail, sleep,
// badshape, badlabel, garbage, nooutput, exclusive.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>

#include <fcntl.h>
#include <unistd.h>

#include "uqseg/npy.hpp"
#include "uqseg/predictor.hpp"

namespace fs = std::filesystem;

int main(int argc, char **argv) {
  std::string input, output, mode = "labels", spec = "builtin:threshold:0.5", lock_dir;
  std::uint64_t seed = 0;
  for (int i = 1; i + 1 < argc; i += 2) {
    const std::string key = argv[i], value = argv[i + 1];
    if (key == "--input")
      input = value;
    else if (key == "--output")
      output = value;
    else if (key == "--seed")
      seed = std::stoull(value);
    else if (key == "--mode")
      mode = value;
    else if (key == "--spec")
      spec = value;
    else if (key == "--lock-dir")
      lock_dir = value;
  }
  try {
    if (mode == "fail") {
      std::cerr << "mock failure: model weights missing\n";
      return 3;
    }
    if (mode == "sleep") {
      std::this_thread::sleep_for(std::chrono::seconds(30));
      return 0;
    }
    if (mode == "nooutput")
      return 0;
    if (mode == "garbage") {
      std::ofstream(output) << "not an array";
      return 0;
    }

    const uqseg::FloatImage image = uqseg::npy::read_float(input);
    const uqseg::LabelMap labels =
        uqseg::predict_labels(uqseg::PredictorSpec::parse(spec), image, seed);

    if (mode == "exclusive") {
      const fs::path lock = fs::path(lock_dir) / "busy";
      const int fd = ::open(lock.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
      if (fd < 0) {
        std::cerr << "concurrent invocation detected\n";
        return 4;
      }
      std::this_thread::sleep_for(std::chrono::milliseconds(30));
      ::close(fd);
      fs::remove(lock);
    }

    if (mode == "probabilities") {
      uqseg::Shape shape{2};
      shape.insert(shape.end(), image.shape().begin(), image.shape().end());
      uqseg::FloatImage probs(shape, 0.0f);
      for (std::size_t i = 0; i < labels.size(); ++i) {
        probs[i] = labels[i] ? 0.25f : 0.75f;
        probs[labels.size() + i] = labels[i] ? 0.75f : 0.25f;
      }
      uqseg::npy::write(uqseg::Tensor(probs), output);
    } else if (mode == "badshape") {
      uqseg::npy::write(uqseg::Tensor(uqseg::LabelMap({3, 3}, std::uint8_t{0})), output);
    } else if (mode == "badlabel") {
      uqseg::npy::write(uqseg::Tensor(labels.like<std::uint8_t>(7)), output);
    } else {
      uqseg::npy::write(uqseg::Tensor(labels), output);
    }
  } catch (const std::exception &e) {
    std::cerr << "mock_predictor: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
