method Average(a: int, b: int) returns (avg: int)
  ensures 2 * avg <= a + b && a + b < 2 * avg + 2
{
  return (a + b) / 2;
}
