method Inc(x: int) returns (y: int)
  ensures y == x + 1
{
  y := x + 1;
}

method Twice(x: int) returns (y: int)
  ensures y == 2 * x
{
  var t := x;
  y := t + x + 1;
}
