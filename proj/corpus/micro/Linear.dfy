method Linear(x: int, y: int) returns (z: int)
  ensures z == 4 * x - 3 * y + 1
{
  return 4 * x - 3 * y + 1;
}
