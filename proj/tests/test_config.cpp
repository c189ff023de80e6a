#include <dualstream/config.hpp>

#include <gtest/gtest.h>

#include <sstream>

using namespace dualstream;

TEST(Config, DefaultsWhenEmpty) {
  std::istringstream in("# nothing\n\n");
  const auto c = read_config(in);
  EXPECT_EQ(c.physics.g, 9.80665);
  EXPECT_EQ(c.train.learning_rate, 1e-3);
  EXPECT_EQ(c.fusion.thresholds.ml, 0.5);
  EXPECT_EQ(c.fusion.aggregate, fusion::Aggregate::Max);
}

TEST(Config, AllKeys) {
  std::istringstream in(
      "g = 9.81\nc_rr=0.01\nlearning_rate=0.002\nbeta1=0.8\nbeta2=0.99\nepsilon=1e-7\n"
      "epochs=5\nbatch_size=16\nclip_norm=2\ntau_ml=0.6\ntau_phys=0.4\naggregate=mean\n");
  const auto c = read_config(in);
  EXPECT_EQ(c.physics.g, 9.81);
  EXPECT_EQ(c.physics.c_rr, 0.01);
  EXPECT_EQ(c.train.learning_rate, 0.002);
  EXPECT_EQ(c.train.beta1, 0.8);
  EXPECT_EQ(c.train.beta2, 0.99);
  EXPECT_EQ(c.train.epsilon, 1e-7);
  EXPECT_EQ(c.train.epochs, 5);
  EXPECT_EQ(c.train.batch_size, 16);
  EXPECT_EQ(c.train.clip_norm, 2.0);
  EXPECT_EQ(c.fusion.thresholds.ml, 0.6);
  EXPECT_EQ(c.fusion.thresholds.phys, 0.4);
  EXPECT_EQ(c.fusion.aggregate, fusion::Aggregate::Mean);
}

TEST(Config, Errors) {
  std::istringstream unknown("gravity=9.8\n");
  EXPECT_THROW(read_config(unknown), ParseError);
  std::istringstream bad_number("g=fast\n");
  EXPECT_THROW(read_config(bad_number), ParseError);
  std::istringstream no_eq("g 9.8\n");
  EXPECT_THROW(read_config(no_eq), ParseError);
  std::istringstream out_of_range("c_rr=0.5\n");
  EXPECT_THROW(read_config(out_of_range), InvalidParams);
  std::istringstream bad_tau("tau_ml=1.5\n");
  EXPECT_THROW(read_config(bad_tau), InvalidParams);
}
