// Copyright 2026 The contactig Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <functional>
#include <string>

#include "contactig/config.hpp"
#include "contactig/presets.hpp"
#include "contactig/sysid.hpp"

namespace contactig {
namespace {

std::string error_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

TEST(ModelJson, RoundTrip) {
  const TwoMassModel m = compliant_feet(1e7).model;
  const TwoMassModel back = model_from_json(model_to_json(m), "config");
  EXPECT_EQ(fit_vector(back), fit_vector(m));
  EXPECT_EQ(back.Ts, m.Ts);
  EXPECT_EQ(back.sigma_w, m.sigma_w);
  EXPECT_EQ(back.sigma_f, m.sigma_f);
  // and through text, at full precision
  const TwoMassModel text =
      model_from_json(Json::parse(model_to_json(m).dump()), "config");
  EXPECT_EQ(fit_vector(text), fit_vector(m));
}

TEST(ModelJson, DefaultsFillMissingFields) {
  const TwoMassModel m = model_from_json(Json{{"K1", 100.0}}, "config");
  EXPECT_EQ(m.K1, 100.0);
  EXPECT_EQ(m.M2, TwoMassModel{}.M2);
  EXPECT_EQ(m.Ts, kDefaultSamplePeriod);
}

TEST(ModelJson, ErrorsCarryTheFieldPath) {
  EXPECT_EQ(error_of([] { model_from_json(Json{{"K1", "stiff"}}, "config.models[1]"); }),
            "config.models[1].K1: expected a number");
  EXPECT_EQ(error_of([] { model_from_json(Json{{"k1", 1.0}}, "config"); }),
            "config.k1: unknown field");
  EXPECT_NE(error_of([] { model_from_json(Json{{"M2", -1.0}}, "config.m"); }).find("config.m: "),
            std::string::npos);
  EXPECT_EQ(error_of([] { model_from_json(Json::array(), "config"); }),
            "config: expected an object");
}

TEST(ContactModeJson, RoundTripAndVectorShorthand) {
  const ContactMode wall{"wall", (Eigen::MatrixXd(1, 2) << -50.0, 50.0).finished(),
                         Eigen::Vector2d(0.1, 0.2)};
  const ContactMode back = contact_mode_from_json(contact_mode_to_json(wall), "m");
  EXPECT_EQ(back.name, "wall");
  EXPECT_EQ(back.stiffness, wall.stiffness);
  EXPECT_EQ(back.rest_position, wall.rest_position);
  // a flat array is one row
  const ContactMode flat = contact_mode_from_json(
      Json{{"stiffness", {100.0}}, {"rest_position", {0.0}}}, "m");
  EXPECT_EQ(flat.stiffness.rows(), 1);
  EXPECT_EQ(flat.stiffness(0, 0), 100.0);
}

TEST(ContactModeJson, Errors) {
  EXPECT_EQ(error_of([] {
              contact_mode_from_json(Json{{"stiffness", {{1.0, 2.0}, {3.0}}},
                                          {"rest_position", {0.0, 0.0}}},
                                     "m");
            }),
            "m.stiffness[1]: ragged matrix");
  EXPECT_EQ(error_of([] {
              contact_mode_from_json(Json{{"stiffness", {1.0}}, {"rest_position", {"x"}}}, "m");
            }),
            "m.rest_position[0]: expected a number");
  EXPECT_EQ(error_of([] { contact_mode_from_json(Json{{"rest_position", {0.0}}}, "m"); }),
            "m.stiffness: missing field");
  EXPECT_NE(error_of([] {
              contact_mode_from_json(Json{{"stiffness", {1.0, 2.0}}, {"rest_position", {0.0}}},
                                     "m");
            }),
            "");
}

TEST(BeliefJson, RoundTripAndErrors) {
  const BeliefVector b(Eigen::Vector3d(0.2, 0.3, 0.5));
  EXPECT_EQ(belief_from_json(belief_to_json(b), "p").probs(), b.probs());
  EXPECT_NE(error_of([] { belief_from_json(Json{0.6, 0.6}, "config.prior"); })
                .rfind("config.prior: ", 0),
            std::string::npos);
  EXPECT_EQ(error_of([] { belief_from_json(Json{0.5, "x"}, "config.prior"); }),
            "config.prior[1]: expected a number");
  EXPECT_EQ(error_of([] { belief_from_json(Json(1.0), "config.prior"); }),
            "config.prior: expected an array of probabilities");
}

TEST(FilterModeJson, BothVariants) {
  const FilterMode kalman{"contact", flex_joints(1e7).model};
  const FilterMode a = filter_mode_from_json(filter_mode_to_json(kalman), "m");
  EXPECT_EQ(a.name, "contact");
  ASSERT_TRUE(std::holds_alternative<TwoMassModel>(a.model));
  EXPECT_EQ(std::get<TwoMassModel>(a.model).sigma_w, 1e7);

  const FilterMode spring{"free", ContactMode::free_space()};
  const FilterMode b = filter_mode_from_json(filter_mode_to_json(spring), "m");
  ASSERT_TRUE(std::holds_alternative<ContactMode>(b.model));
  EXPECT_TRUE(std::get<ContactMode>(b.model).is_free_space());

  EXPECT_EQ(error_of([] { filter_mode_from_json(Json{{"name", "x"}}, "m"); }),
            "m: give exactly one of 'model' or 'contact_mode'");
}

TEST(InputJson, EveryTypeRoundTrips) {
  const std::vector<InputSignal> inputs{
      ConstantInput{1e-3}, StepInput{0.5, 0.0, -1e-3}, RampInput{0.1, 0.0, -5e-3},
      ChirpInput{1e-3, 0.5, 50.0, 5.0, 0.0},
      PiecewiseLinearInput{{0.0, 1.0}, {0.0, -1e-3}}};
  for (const InputSignal& s : inputs) {
    const InputSignal back = input_from_json(input_to_json(s), "input");
    for (double t : {0.0, 0.3, 0.75, 2.0}) EXPECT_EQ(evaluate(back, t), evaluate(s, t));
  }
}

TEST(InputJson, Errors) {
  EXPECT_EQ(error_of([] { input_from_json(Json{{"type", "square"}}, "config.input"); }),
            "config.input.type: unknown input type 'square'");
  EXPECT_EQ(error_of([] { input_from_json(Json{{"type", "step"}, {"at", 1.0}}, "config.input"); }),
            "config.input.after: missing field");
  EXPECT_EQ(error_of([] {
              input_from_json(Json{{"type", "constant"}, {"value", 1.0}, {"rate", 2.0}},
                              "config.input");
            }),
            "config.input.rate: unknown field");
  EXPECT_NE(error_of([] {
              input_from_json(Json{{"type", "piecewise_linear"}, {"times", {0.0}}, {"values", Json::array()}},
                              "config.input");
            }),
            "");
}

TEST(ScheduleJson, RoundTripAndErrors) {
  const std::vector<ModeInterval> s{{0.0, 0.5, 0}, {0.5, 1.0, 1}};
  const std::vector<ModeInterval> back = schedule_from_json(schedule_to_json(s), "sched");
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[1].start, 0.5);
  EXPECT_EQ(back[1].mode_id, 1);
  EXPECT_EQ(error_of([] { schedule_from_json(Json::array(), "config.schedule"); }),
            "config.schedule: expected a non-empty array of intervals");
  EXPECT_EQ(error_of([] {
              schedule_from_json(Json{{{"start", 0.0}, {"end", 1.0}, {"mode_id", 0.5}}},
                                 "config.schedule");
            }),
            "config.schedule[0].mode_id: expected an integer");
}

TEST(SchemaVersion, OnlyVersionOneAccepted) {
  const Json ok{{"schema_version", 1}};
  ObjectReader r(ok, "config");
  EXPECT_NO_THROW(check_schema_version(r));
  const Json bad{{"schema_version", 2}};
  ObjectReader r2(bad, "config");
  EXPECT_THROW(check_schema_version(r2), ConfigError);
}

TEST(LoadJsonFile, MissingAndMalformed) {
  EXPECT_THROW(load_json_file("/nonexistent/contactig.json"), ConfigError);
  const std::string path = std::string(CONTACTIG_TEST_TMP) + "/bad.json";
  std::filesystem::create_directories(CONTACTIG_TEST_TMP);
  std::ofstream(path) << "{ not json";
  EXPECT_THROW(load_json_file(path), ConfigError);
}

}  // namespace
}  // namespace contactig
