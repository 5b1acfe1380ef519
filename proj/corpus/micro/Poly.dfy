method Poly(x: int) returns (y: int)
  ensures y == x * x + 2 * x + 1
{
  var t := x + 1;
  return t * t;
}
