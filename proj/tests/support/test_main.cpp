#include <malloc.h>

#include <gtest/gtest.h>

int main(int argc, char** argv) {
  // same allocator tuning as the command line tool
  mallopt(M_MMAP_THRESHOLD, 1 << 30);
  mallopt(M_TRIM_THRESHOLD, 1 << 30);
  testing::InitGoogleTest(&argc, argv);
  return RUN_ALL_TESTS();
}
