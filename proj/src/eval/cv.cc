// Copyright 2026  The trivox authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "eval/cv.h"

#include <algorithm>
#include <map>
#include <set>

#include "core/check.h"
#include "core/rng.h"

namespace trivox::eval {

std::optional<EmotionLabel> map_raw_label(const std::string& raw) {
  std::string s;
  for (char c : raw) s.push_back(char(std::tolower(c)));
  if (s == "angry" || s == "ang") return EmotionLabel::kAngry;
  if (s == "sad") return EmotionLabel::kSad;
  if (s == "happy" || s == "hap") return EmotionLabel::kHappy;
  if (s == "excited" || s == "exc") return EmotionLabel::kHappy;  // merged
  if (s == "neutral" || s == "neu") return EmotionLabel::kNeutral;
  return std::nullopt;
}

std::string emotion_name(EmotionLabel e) {
  switch (e) {
    case EmotionLabel::kAngry: return "angry";
    case EmotionLabel::kSad: return "sad";
    case EmotionLabel::kHappy: return "happy";
    case EmotionLabel::kNeutral: return "neutral";
  }
  return "?";
}

namespace {
struct Grouped {
  // session -> speaker -> utt ids (only label-mappable rows)
  std::map<std::string, std::map<std::string, std::vector<std::string>>> by_session;
};

Grouped group(const pipeline::Manifest& manifest) {
  Grouped g;
  for (const auto& r : manifest.rows) {
    if (!map_raw_label(r.raw_label).has_value()) continue;
    TVX_CHECK(!r.session_id.empty())
        << "utterance " << r.utt_id << " lacks a session id";
    g.by_session[r.session_id][r.speaker_id].push_back(r.utt_id);
  }
  TVX_CHECK(!g.by_session.empty()) << "no utterances with usable emotion labels";
  return g;
}

void append_session(const Grouped& g, const std::string& session,
                    std::vector<std::string>* out) {
  for (const auto& [spk, ids] : g.by_session.at(session))
    out->insert(out->end(), ids.begin(), ids.end());
}
}  // namespace

CVPlan build_cv_plan(const pipeline::Manifest& manifest, CvMode mode,
                     uint64_t seed) {
  const Grouped g = group(manifest);
  std::vector<std::string> sessions;
  for (const auto& [s, _] : g.by_session) sessions.push_back(s);

  CVPlan plan;
  plan.mode = mode;
  plan.val_pick_seed = seed;
  Rng rng(Rng::mix(seed, 0xcf01d));

  if (mode == CvMode::kLeaveOneSessionOut) {
    TVX_CHECK(sessions.size() >= 3)
        << "leave-one-session-out needs at least 3 sessions, got "
        << sessions.size();
    for (const auto& test_session : sessions) {
      CvFold fold;
      append_session(g, test_session, &fold.test_ids);
      // A random other session becomes validation.
      std::vector<std::string> others;
      for (const auto& s : sessions)
        if (s != test_session) others.push_back(s);
      const std::string val_session =
          others[rng.uniform_int(uint64_t(others.size()))];
      append_session(g, val_session, &fold.val_ids);
      for (const auto& s : others)
        if (s != val_session) append_session(g, s, &fold.train_ids);
      plan.folds.push_back(std::move(fold));
    }
  } else {
    for (const auto& session : sessions) {
      const auto& speakers = g.by_session.at(session);
      TVX_CHECK(speakers.size() == 2)
          << "leave-one-speaker-out expects 2 speakers per session; session "
          << session << " has " << speakers.size();
      for (const auto& [test_speaker, test_ids] : speakers) {
        CvFold fold;
        fold.test_ids = test_ids;
        for (const auto& [other_speaker, other_ids] : speakers)
          if (other_speaker != test_speaker)
            fold.val_ids.insert(fold.val_ids.end(), other_ids.begin(),
                                other_ids.end());
        for (const auto& s : sessions)
          if (s != session) append_session(g, s, &fold.train_ids);
        plan.folds.push_back(std::move(fold));
      }
    }
  }
  check_cv_plan(plan, manifest);
  return plan;
}

void check_cv_plan(const CVPlan& plan, const pipeline::Manifest& manifest) {
  std::map<std::string, const pipeline::ManifestRow*> rows;
  std::set<std::string> eligible;
  for (const auto& r : manifest.rows) {
    rows[r.utt_id] = &r;
    if (map_raw_label(r.raw_label).has_value()) eligible.insert(r.utt_id);
  }
  std::set<std::string> seen_test;
  for (const auto& fold : plan.folds) {
    std::set<std::string> test(fold.test_ids.begin(), fold.test_ids.end());
    std::set<std::string> val(fold.val_ids.begin(), fold.val_ids.end());
    std::set<std::string> train(fold.train_ids.begin(), fold.train_ids.end());
    for (const auto& id : fold.test_ids) {
      TVX_CHECK(seen_test.insert(id).second)
          << "utterance " << id << " appears in two test folds";
      TVX_CHECK(val.count(id) == 0 && train.count(id) == 0)
          << "utterance " << id << " leaks between test and train/val";
    }
    for (const auto& id : fold.val_ids)
      TVX_CHECK(train.count(id) == 0) << "utterance " << id
                                      << " in both val and train";
    // No session (session mode) or speaker crosses the test boundary.
    std::set<std::string> test_sessions, test_speakers;
    for (const auto& id : fold.test_ids) {
      test_sessions.insert(rows.at(id)->session_id);
      test_speakers.insert(rows.at(id)->speaker_id);
    }
    for (const auto& id : fold.train_ids) {
      if (plan.mode == CvMode::kLeaveOneSessionOut)
        TVX_CHECK(test_sessions.count(rows.at(id)->session_id) == 0)
            << "session leakage into training in fold";
      TVX_CHECK(test_speakers.count(rows.at(id)->speaker_id) == 0)
          << "speaker leakage into training in fold";
    }
    if (plan.mode == CvMode::kLeaveOneSessionOut)
      for (const auto& id : fold.val_ids)
        TVX_CHECK(test_sessions.count(rows.at(id)->session_id) == 0)
            << "session leakage into validation in fold";
  }
  TVX_CHECK(seen_test == eligible)
      << "test folds do not partition the eligible utterances";
}

}  // namespace trivox::eval
