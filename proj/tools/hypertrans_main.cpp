#include <iostream>
int main(int argc, char** argv) {
  (void)argc; (void)argv;
  std::cout << "placeholder\n";
  return 0;
}
