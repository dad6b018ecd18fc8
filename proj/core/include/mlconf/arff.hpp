#pragma once

#include <string>
#include <vector>

#include "mlconf/dataset.hpp"

namespace mlconf {

/// Where the label attributes live in an ARFF file. An explicit name list
/// wins; otherwise a MEKA-style "-C k" (k > 0: first k attributes, k < 0:
/// last |k|), either given here or parsed from the @relation line.
struct LabelSpec {
    std::vector<std::string> label_names;
    int meka_c = 0;  // 0: read "-C k" from the @relation line
};

/// Parse MULAN/MEKA ARFF text (dense or sparse rows). Nominal non-label
/// attributes are one-hot expanded in declaration order; label attributes
/// must be binary ({0,1} nominal or numeric 0/1). Missing values are an
/// error in labels and mean-imputed in numeric features.
MLDataset parse_arff(const std::string& text, const LabelSpec& spec,
                     const std::string& dataset_name = "");

MLDataset load_arff(const std::string& path, const LabelSpec& spec);

}  // namespace mlconf
