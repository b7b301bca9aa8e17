// childtts/jsonio.h

// Copyright 2026  The childtts Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef CHILDTTS_JSONIO_H_
#define CHILDTTS_JSONIO_H_

#include <set>
#include <string>

#include "json.hpp"

#include "childtts/acoustic.h"
#include "childtts/dsp.h"
#include "childtts/trainer.h"

namespace childtts {

using Json = nlohmann::json;

// Reads fields out of a JSON object, rejecting unknown keys and values of
// the wrong type with kValidation errors that name the full key path.
// Absent keys leave the target untouched.
class StrictObject {
 public:
  StrictObject(const Json &j, std::string path);

  template <class T>
  void Get(const std::string &key, T *out) {
    seen_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end()) return;
    try {
      *out = it->template get<T>();
    } catch (const Json::exception &) {
      Fail(ErrorKind::kValidation, "config: " + Key(key) + " has the wrong type");
    }
  }
  const Json *Child(const std::string &key);
  bool Has(const std::string &key) const { return j_.contains(key); }
  std::string Key(const std::string &key) const { return path_.empty() ? key : path_ + "." + key; }
  // Errors on any key no Get/Child call asked for.
  void Finish() const;

 private:
  const Json &j_;
  std::string path_;
  std::set<std::string> seen_;
};

Json ToJson(const dsp::MelCfg &c);
Json ToJson(const dsp::F0Cfg &c);
Json ToJson(const acoustic::ModelCfg &c);
Json ToJson(const trainer::TrainCfg &c);
void FromJson(const Json &j, const std::string &path, dsp::MelCfg *c);
void FromJson(const Json &j, const std::string &path, dsp::F0Cfg *c);
void FromJson(const Json &j, const std::string &path, acoustic::ModelCfg *c);
void FromJson(const Json &j, const std::string &path, trainer::TrainCfg *c);

}  // namespace childtts

#endif  // CHILDTTS_JSONIO_H_
